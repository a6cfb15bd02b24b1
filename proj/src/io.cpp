#include "snake/io.hpp"

#include "snake/error.hpp"

#include <fmt/chrono.h>
#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace snake::io {

namespace {

void dump_into(std::string& out, const Json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += pad + Json(it.key()).dump() + sep;
            dump_into(out, it.value(), indent, depth + 1);
        }
        out += close + '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const Json& v : j) {
            if (!first) out += ',';
            first = false;
            out += pad;
            dump_into(out, v, indent, depth + 1);
        }
        out += close + ']';
        return;
    }
    case Json::value_t::number_float: out += format_number(j.get<double>()); return;
    default: out += j.dump(); return;
    }
}

std::string csv_cell(const Json& v) {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    if (v.is_structured()) return csv_cell(Json(dump(v, 0)));
    return v.dump();
}

} // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    return fmt::format("{:.17g}", v);
}

std::string dump(const Json& j, int indent) {
    std::string out;
    dump_into(out, j, indent, 0);
    return out;
}

Json document(const std::string& command, Json result, const std::string& timestamp) {
    Json doc;
    doc["schema"] = kSchema;
    doc["header"] = {{"command", command}, {"timestamp", timestamp}};
    doc["result"] = std::move(result);
    return doc;
}

std::string utc_timestamp() {
    auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

Json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Json words_json(const std::vector<RWord>& words) {
    Json out = Json::array();
    for (const RWord& w : words) out.push_back({{"coefficient", w.coefficient}, {"word", word_to_string(w)}});
    return out;
}

EventQuery parse_event_query(const Json& j) {
    require(j.is_array(), ErrorCode::Precondition, "an event query is a JSON array");
    EventQuery q;
    for (const Json& e : j) {
        require(e.is_object() && e.contains("step"), ErrorCode::Precondition, "each event needs a \"step\"");
        Site x;
        if (e.contains("site")) {
            const Json& s = e.at("site");
            require(s.is_array() && s.size() == 2, ErrorCode::Precondition, "\"site\" is a pair [x1, x2]");
            x = {s[0].get<int>(), s[1].get<int>()};
        } else {
            require(e.contains("x1") && e.contains("x2"), ErrorCode::Precondition, "each event needs x1 and x2");
            x = {e.at("x1").get<int>(), e.at("x2").get<int>()};
        }
        q.push_back({x, step_from_name(e.at("step").get<std::string>())});
    }
    return q;
}

Json event_query_json(const EventQuery& q) {
    Json out = Json::array();
    for (const Event& e : q) out.push_back({{"x1", e.site.x1}, {"x2", e.site.x2}, {"step", step_name(e.step)}});
    return out;
}

Json config_json(const SnakeConfig& c) {
    Json steps = Json::array();
    for (Step s : c.steps()) steps.push_back(step_name(s));
    return {{"m1", c.shape().m1}, {"m2", c.shape().m2}, {"steps", steps}};
}

SnakeConfig parse_snake_config(const Json& j) {
    require(j.is_object() && j.contains("m1") && j.contains("m2") && j.contains("steps"), ErrorCode::Precondition,
            "a configuration needs m1, m2 and steps");
    std::vector<Step> steps;
    for (const Json& s : j.at("steps")) steps.push_back(step_from_name(s.get<std::string>()));
    TorusShape shape{j.at("m1").get<int>(), j.at("m2").get<int>()};
    require(static_cast<int>(steps.size()) == shape.sites(), ErrorCode::Precondition, "one step per site is needed");
    return SnakeConfig(shape, std::move(steps));
}

Params parse_params(const Json& j) {
    require(j.is_object(), ErrorCode::Precondition, "params is an object");
    return {j.value("alpha", 1.0), j.value("beta", 0.0), j.value("gamma", 0.0), j.value("delta", 0.0)};
}

CorrelationRequest parse_correlation_request(const Json& j) {
    require(j.is_object() && j.contains("shape") && j.contains("events"), ErrorCode::Precondition,
            "a correlation request needs shape and events");
    const Json& s = j.at("shape");
    CorrelationRequest r;
    if (s.is_array()) {
        require(s.size() == 2, ErrorCode::Precondition, "shape is [m1, m2]");
        r.shape = {s[0].get<int>(), s[1].get<int>()};
    } else {
        r.shape = {s.at("m1").get<int>(), s.at("m2").get<int>()};
    }
    r.params = j.contains("params") ? parse_params(j.at("params")) : Params{};
    r.events = parse_event_query(j.at("events"));
    return r;
}

Json json_argument(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\n");
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
        try {
            return Json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Precondition, std::string("inline JSON: ") + e.what());
        }
    }
    return read_json_file(text);
}

std::vector<SpaceTimeEvent> parse_spacetime_events(const Json& j) {
    require(j.is_array(), ErrorCode::Precondition, "space-time events are a JSON array");
    std::vector<SpaceTimeEvent> out;
    for (const Json& e : j) {
        require(e.is_object() && e.contains("t") && e.contains("h") && e.contains("f"), ErrorCode::Precondition,
                "each event needs \"t\", \"h\" and \"f\"");
        out.push_back({e.at("t").get<double>(), e.at("h").get<int>(), step_from_name(e.at("f").get<std::string>())});
    }
    return out;
}

WalkerConfig parse_config(const Json& j, int n) {
    if (j.is_object()) return make_config(j.at("n").get<int>(), j.at("positions").get<std::vector<int>>());
    require(j.is_array(), ErrorCode::Precondition, "a configuration is an array of positions");
    return make_config(n, j.get<std::vector<int>>());
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Precondition, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Precondition, path + ": " + e.what());
    }
}

std::string to_csv(const Json& result, const std::string& table) {
    std::ostringstream out;
    if (result.is_object() && result.contains(table) && result[table].is_array() && !result[table].empty()) {
        const Json& rows = result[table];
        bool first = true;
        for (auto it = rows[0].begin(); it != rows[0].end(); ++it) {
            out << (first ? "" : ",") << it.key();
            first = false;
        }
        out << '\n';
        for (const Json& r : rows) {
            first = true;
            for (auto it = rows[0].begin(); it != rows[0].end(); ++it) {
                out << (first ? "" : ",") << (r.contains(it.key()) ? csv_cell(r[it.key()]) : "");
                first = false;
            }
            out << '\n';
        }
        return out.str();
    }
    out << "key,value\n";
    if (result.is_object()) {
        for (auto it = result.begin(); it != result.end(); ++it)
            if (!it.value().is_structured()) out << it.key() << ',' << csv_cell(it.value()) << '\n';
    } else {
        out << "value," << csv_cell(result) << '\n';
    }
    return out.str();
}

} // namespace snake::io
