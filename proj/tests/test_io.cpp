#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snake/error.hpp"
#include "snake/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace snake;
using io::Json;

TEST_CASE("numbers round-trip with 17 significant digits") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 1e-12 + 1.0}) {
        std::string s = io::format_number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(io::format_number(std::numeric_limits<double>::quiet_NaN()) == "null");
    CHECK(io::format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("dump keeps order, integers and escapes") {
    Json j;
    j["b"] = 0.1;
    j["a"] = 3;
    j["s"] = "x\"y";
    j["v"] = Json::array({1.5, true, nullptr});
    j["e"] = Json::object();
    CHECK(io::dump(j, 0) == R"({"b":0.10000000000000001,"a":3,"s":"x\"y","v":[1.5,true,null],"e":{}})");
    Json back = Json::parse(io::dump(j));
    CHECK(back["b"].get<double>() == 0.1);
    CHECK(back["a"].is_number_integer());
}

TEST_CASE("document envelope isolates the timestamp") {
    Json a = io::document("partition", {{"z", 1.25}}, "2020-01-01T00:00:00Z");
    Json b = io::document("partition", {{"z", 1.25}}, "2021-01-01T00:00:00Z");
    CHECK(a["schema"] == 1);
    CHECK(io::dump(a["result"]) == io::dump(b["result"]));
    CHECK(a["header"]["timestamp"] != b["header"]["timestamp"]);
    CHECK(io::utc_timestamp().size() == 20);
}

TEST_CASE("event queries") {
    Json q = Json::parse(R"([{"site":[1,2],"step":"up"},{"site":[0,0],"step":"right"}])");
    EventQuery e = io::parse_event_query(q);
    REQUIRE(e.size() == 2);
    CHECK(e[0].site.x1 == 1);
    CHECK(e[0].site.x2 == 2);
    CHECK(e[0].step == Step::Up);
    CHECK(io::parse_event_query(io::event_query_json(e)).size() == 2);
    CHECK(io::event_query_json(e)[0] == Json::parse(R"({"x1":1,"x2":2,"step":"up"})"));
    CHECK(io::parse_event_query(Json::parse(R"([{"x1":3,"x2":0,"step":"fixed"}])"))[0].site.x1 == 3);
    CHECK_THROWS_AS(io::parse_event_query(Json::parse(R"([{"site":[1],"step":"up"}])")), Error);
    CHECK_THROWS_AS(io::parse_event_query(Json::parse(R"([{"site":[1,1],"step":"sideways"}])")), Error);
    CHECK_THROWS_AS(io::parse_event_query(Json::parse(R"({"site":[1,1]})")), Error);

    auto st = io::parse_spacetime_events(Json::parse(R"([{"t":0.5,"h":3,"f":"down"}])"));
    REQUIRE(st.size() == 1);
    CHECK(st[0].t == 0.5);
    CHECK(st[0].h == 3);
    CHECK(st[0].f == Step::Down);

    CHECK(io::parse_config(Json::parse("[4, 1]"), 5).positions == std::vector<int>{1, 4});
    CHECK(io::parse_config(Json::parse(R"({"n": 6, "positions": [7]})"), 0).positions == std::vector<int>{1});
}

TEST_CASE("csv") {
    Json rows;
    rows["rows"] = Json::array({{{"t", 0.5}, {"state", "0 2"}}, {{"t", 1}, {"state", "a,b"}}});
    CHECK(io::to_csv(rows) == "t,state\n0.5,0 2\n1,\"a,b\"\n");
    CHECK(io::to_csv(Json{{"z", 2.0}, {"nested", {1, 2}}}) == "key,value\nz,2\n");
}

TEST_CASE("configurations and correlation requests") {
    SnakeConfig c = from_grid(">>\n..\n");
    Json j = io::config_json(c);
    CHECK(std::count(j["steps"].begin(), j["steps"].end(), "right") == 2);
    CHECK(io::parse_snake_config(j) == c);
    CHECK(io::parse_snake_config(Json::parse(io::dump(j))) == c);
    CHECK_THROWS_AS(io::parse_snake_config(Json{{"m1", 2}, {"m2", 2}, {"steps", {"right"}}}), Error);

    auto r = io::parse_correlation_request(Json::parse(
        R"({"shape":[3,3],"params":{"alpha":1,"beta":0.5,"gamma":0.2,"delta":0.1},"events":[{"x1":0,"x2":1,"step":"up"}]})"));
    CHECK(r.shape.m1 == 3);
    CHECK(r.params.beta == 0.5);
    CHECK(r.events.size() == 1);
    CHECK(io::json_argument(" [1, 2]").size() == 2);
    CHECK_THROWS_AS(io::json_argument("/nonexistent/file.json"), Error);
}
