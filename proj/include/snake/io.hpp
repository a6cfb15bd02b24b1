// JSON and CSV serialisation shared by the command-line tool.
#pragma once

#include "snake/events.hpp"
#include "snake/kasteleyn.hpp"
#include "snake/ring.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace snake::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

// 17 significant digits, so every double round-trips; non-finite values become null.
std::string format_number(double v);
// Like Json::dump but with numbers written by format_number.
std::string dump(const Json& j, int indent = 2);

// {"schema": 1, "header": {"command", "timestamp"}, "result": ...}. Only the header
// varies between identical runs.
Json document(const std::string& command, Json result, const std::string& timestamp);
std::string utc_timestamp();

Json complex_json(cplx z); // {"re", "im"}
Json words_json(const std::vector<RWord>& words);

// [{"x1": 0, "x2": 1, "step": "up"}, ...]; {"site": [x1, x2], ...} is also accepted.
EventQuery parse_event_query(const Json& j);
Json event_query_json(const EventQuery& q);
// [{"t": 0.5, "h": 2, "f": "right"}, ...]
std::vector<SpaceTimeEvent> parse_spacetime_events(const Json& j);
// {"n": 5, "positions": [0, 2]} or a bare array of positions with n given separately.
WalkerConfig parse_config(const Json& j, int n);

// {"m1", "m2", "steps": ["fixed", "right", ...]} in row-major site order.
Json config_json(const SnakeConfig& c);
SnakeConfig parse_snake_config(const Json& j);

// A correlation request {"shape": [m1, m2], "params": {alpha, beta, gamma, delta}, "events": [...]}.
struct CorrelationRequest {
    TorusShape shape;
    Params params;
    EventQuery events;
};
CorrelationRequest parse_correlation_request(const Json& j);
Params parse_params(const Json& j);

// Inline JSON when the text starts with '[' or '{', otherwise a file path.
Json json_argument(const std::string& text);
Json read_json_file(const std::string& path);

// The result's `table` array of flat objects as a CSV table; without one, its scalar
// fields as key,value lines.
std::string to_csv(const Json& result, const std::string& table = "rows");

} // namespace snake::io
