// Twisted Kasteleyn operators on the torus, the partition function and correlations.
#pragma once

#include "snake/events.hpp"
#include "snake/lattice.hpp"

#include <array>
#include <complex>
#include <vector>

namespace snake {

using cplx = std::complex<double>;

struct Sector {
    int theta1 = 0;
    int theta2 = 0;
    bool operator==(const Sector&) const = default;
};

inline constexpr std::array<Sector, 4> kSectors{Sector{0, 0}, Sector{0, 1}, Sector{1, 0}, Sector{1, 1}};

cplx k_entry(Sector sector, const TorusShape& shape, const Params& params, Site x, Site y);

// K_00 weight of a single step: alpha, beta, gamma or delta.
double step_weight(const Params& p, Step s);

// Determinant kept as modulus logarithm and phase so large tori do not overflow.
struct LogDet {
    double log_abs = 0.0;
    cplx phase{1.0, 0.0};
    bool zero = false;     // an eigenvalue vanishes exactly
    bool singular = false; // smallest eigenvalue below 1e-12 of the largest
    cplx value() const;
};

LogDet log_det_K(Sector sector, const TorusShape& shape, const Params& params);
cplx det_K(Sector sector, const TorusShape& shape, const Params& params);
double c_coeff(Sector sector, const TorusShape& shape);

// Eigenvalue alpha + beta z + gamma w + delta / w at the (j,k)-th twisted roots.
cplx twisted_root_z(Sector sector, const TorusShape& shape, int j);
cplx twisted_root_w(Sector sector, const TorusShape& shape, int k);

struct PartitionReport {
    double z = 0.0;
    std::array<cplx, 4> c_det{};   // C_theta det K_theta
    std::array<LogDet, 4> det{};
    std::array<cplx, 4> lambda{};  // C_theta det K_theta / Z
    double log_abs_z = 0.0;
};

PartitionReport partition_report(const TorusShape& shape, const Params& params);
double partition_function(const TorusShape& shape, const Params& params);

// Inverse kernel H_theta for one sector, with coordinates taken in Z^2. The twist
// sits on the seam: H(x,y) exp(i pi (theta1 (y1-x1)/m1 + theta2 (y2-x2)/m2)) = K^{-1}(x,y).
class KernelTable {
public:
    KernelTable(Sector sector, const TorusShape& shape, const Params& params);

    Sector sector() const { return sector_; }
    bool singular() const { return singular_; }
    cplx h(Site x, Site xp) const; // throws SingularSector when singular

private:
    Sector sector_;
    TorusShape shape_;
    bool singular_ = false;
    std::vector<cplx> inv_;   // 1/lambda_{j,k}, index j*m2+k
    std::vector<cplx> e1_;    // exp(i pi k / m1), k < 2 m1
    std::vector<cplx> e2_;    // exp(i pi k / m2), k < 2 m2
};

cplx h_kernel(Sector sector, const TorusShape& shape, const Params& params, Site x, Site xp);

cplx signed_correlation(const KernelTable& table, const Params& params, const RWord& word);
cplx signed_correlation(Sector sector, const TorusShape& shape, const Params& params, const RWord& word);

struct SectorTerm {
    Sector sector;
    cplx lambda;
    LogDet det;
    bool dense_fallback = false;
};

struct CorrelationReport {
    double value = 0.0;
    std::vector<SectorTerm> sectors;
    std::vector<RWord> words;
};

struct CorrelationOptions {
    bool require_regime = true;
    int theta2 = -1; // -1: full measure; 0 or 1: sector measure
    int dense_fallback_cap = 400; // singular sectors handled densely up to this many sites
};

CorrelationReport correlate(const TorusShape& shape, const Params& params, const EventQuery& query,
                            const CorrelationOptions& opt = {});
double correlation(const TorusShape& shape, const Params& params, const EventQuery& query);
double sector_measure(int theta2, const TorusShape& shape, const Params& params, const EventQuery& query);
// Z_{theta2} = sum over theta1 of C_theta det K_theta.
double sector_partition(int theta2, const TorusShape& shape, const Params& params);

} // namespace snake
