// Scaling limits: the semi-infinite cylinder, the plane, and the arc geometry
// deciding which roots of unity sit on each side of the phase transition.
#pragma once

#include "snake/events.hpp"
#include "snake/kasteleyn.hpp"

#include <array>
#include <optional>
#include <vector>

namespace snake {

// Roots of w^n = (-1)^(n-ell+1), split into the ell of least real part and the rest.
// Each root is exp(i pi k / n) with k in (-n, n] of parity n-ell+1.
struct RootSets {
    int ell = 0;
    int n = 0;
    std::vector<cplx> L, R;
    std::vector<int> L_k, R_k;
};

RootSets root_sets(int ell, int n);

// sin(pi ell / n) / sin(pi / n) = -(sum of L); zero for ell = 0 and ell = n > 1.
double mu_ln(int ell, int n);

struct CylinderSpec {
    int ell = 0;
    int n = 2;
    double gamma = 0.0;
    double delta = 0.0;
};

// Kernel of the cylinder measure on Z x [n]. Second coordinates are taken in Z.
class CylinderKernel {
public:
    explicit CylinderKernel(const CylinderSpec& spec);

    const CylinderSpec& spec() const { return spec_; }
    const RootSets& roots() const { return roots_; }
    // Weights actually used: for n = 2 a vertical step is Up, with weight gamma + delta.
    double gamma() const { return gamma_; }
    double delta() const { return delta_; }
    cplx h(Site x, Site y) const; // throws VanishingDenominator when 1 + gamma w + delta/w = 0 is needed
    double prefactor(Step s) const; // 1, -1, gamma, delta

private:
    CylinderSpec spec_;
    RootSets roots_;
    double gamma_ = 0.0, delta_ = 0.0;
    std::vector<cplx> dL_, dR_;
};

cplx cylinder_h(const CylinderSpec& spec, Site x, Site y);

struct LimitCorrelation {
    double value = 0.0;
    std::vector<RWord> words;
    double quadrature_error = 0.0;
};

LimitCorrelation cylinder_correlation(const CylinderSpec& spec, const EventQuery& query);

// ell picked out by beta in the theta2 sector; rejects beta within 1e-9 of a root modulus.
int cylinder_ell_from_beta(double beta, double gamma, double delta, int n, int theta2);

struct PlaneSpec {
    double tau = 0.5;
    double gamma = 0.0;
    double delta = 0.0;
    double tolerance = 1e-10;
};

struct QuadResult {
    cplx value;
    double error = 0.0;
};

// Contour integral over the unit-circle arc through +1 (y1 >= x1) or -1 (y1 < x1)
// with endpoints exp(+-i pi (1 - tau)); requires gamma + delta < 1.
QuadResult plane_h(const PlaneSpec& spec, Site x, Site y);
LimitCorrelation plane_correlation(const PlaneSpec& spec, const EventQuery& query);

struct ArcGeometry {
    bool intersects = false;       // circle of radius beta meets the ellipse 1 + gamma w + delta/w
    bool full = false;             // every w on the circle has |1 + gamma w + delta/w| > beta
    bool empty = false;            // no w does
    std::optional<double> t_beta;  // arc half-angle; absent when the modulus is constant
    std::array<bool, 2> generic{{true, true}}; // per root parity eta, when n > 0
};

ArcGeometry arc_geometry(double beta, double gamma, double delta, int n = 0);

// |1 + gamma e^{it} + delta e^{-it}| > beta sampled at `samples` points forms one arc
// symmetric about t = 0 whose ends agree with t_beta to one sample spacing. Samples
// within 1e-12 of beta count as ties and are skipped.
bool arc_single_interval(double beta, double gamma, double delta, int samples);

// Predicted sign of C_theta det K_theta (alpha = 1), or nothing when beta is not generic
// for theta2 or sits on 1 +- (gamma + delta).
std::optional<int> predicted_sector_sign(double beta, double gamma, double delta, const TorusShape& shape,
                                         Sector sector);

} // namespace snake
