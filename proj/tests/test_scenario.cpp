#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nilab/scenario.hpp"

using namespace nilab;
using nlohmann::json;

namespace {

int run(const json& doc, scenario::RunFlags flags, std::string* text = nullptr) {
    std::ostringstream out;
    int code = scenario::run_document(doc, flags, out);
    if (text) *text = out.str();
    return code;
}

json tiny_doc() {
    return json::parse(R"({
        "name": "tiny",
        "groups": {"z2": {"orders": [2]}},
        "spaces": {"d1": {"dk": {"group": "z2", "k": 1}}},
        "tasks": [{"op": "verify-nilspace", "space": "d1"}]
    })");
}

} // namespace

TEST_CASE("a passing document exits 0") {
    scenario::RunFlags flags;
    std::string text;
    CHECK(run(tiny_doc(), flags, &text) == 0);
    CHECK(text.find("summary: 1 tasks, 1 ok") != std::string::npos);
}

TEST_CASE("an unmet expectation exits 1, an unknown op exits 2") {
    json doc = tiny_doc();
    doc["tasks"][0]["expect"] = {{"verdict", "fail"}};
    scenario::RunFlags flags;
    std::string text;
    CHECK(run(doc, flags, &text) == 1);
    CHECK(text.find("UNMET") != std::string::npos);

    json bad = tiny_doc();
    bad["tasks"][0]["op"] = "no-such-op";
    CHECK(run(bad, flags) == 2);
}

TEST_CASE("an expected error counts as met") {
    json doc = tiny_doc();
    doc["tasks"].push_back(json{{"op", "step"},
                                {"space", "missing"},
                                {"expect", {{"verdict", "error"}}}});
    scenario::RunFlags flags;
    CHECK(run(doc, flags) == 0);
}

TEST_CASE("cyclic definitions are rejected as input errors") {
    json doc = json::parse(R"({
        "name": "cycle",
        "spaces": {"a": {"product": {"factors": ["a"]}}},
        "tasks": [{"op": "step", "space": "a"}]
    })");
    scenario::RunFlags flags;
    std::string text;
    CHECK(run(doc, flags, &text) == 2);
    CHECK(text.find("cyclic definition") != std::string::npos);
}

TEST_CASE("paranoid mode re-verifies spaces without changing the outcome") {
    scenario::RunFlags flags;
    flags.paranoid = 2;
    CHECK(run(tiny_doc(), flags) == 0);
}

TEST_CASE("machine reports carry the run schema") {
    scenario::RunFlags flags;
    flags.report = "machine";
    flags.seed = 7;
    json doc = tiny_doc();
    doc["tasks"][0]["expect"] = {{"verdict", "pass"}};
    std::string text;
    int code = run(doc, flags, &text);
    CHECK(code == 0);
    json rep = json::parse(text);
    CHECK(rep.at("version") == 1);
    CHECK(rep.at("document") == "tiny");
    CHECK(rep.at("seed") == 7);
    CHECK(rep.at("tasks").size() == 1);
    CHECK(rep.at("tasks")[0].at("ok") == true);
    CHECK(rep.at("tasks")[0].at("expect") == json{{"verdict", "pass"}});
    CHECK(rep.at("summary").at("exit") == code);
}

TEST_CASE("machine reports are byte-identical across runs") {
    scenario::RunFlags flags;
    flags.report = "machine";
    std::string a, b;
    run(tiny_doc(), flags, &a);
    run(tiny_doc(), flags, &b);
    CHECK(a == b);
    CHECK(!a.empty());
}

TEST_CASE("file loading distinguishes parse errors from missing files") {
    scenario::RunFlags flags;
    std::string path = "/tmp/nilab_broken_scenario.json";
    {
        std::ofstream f(path);
        f << "{ \"name\": ";
    }
    std::ostringstream out;
    CHECK(scenario::run_file(path, flags, out) == 2);
    CHECK(out.str().find("parse error at byte") != std::string::npos);
    std::remove(path.c_str());

    std::ostringstream out2;
    CHECK(scenario::run_file("/tmp/nilab_does_not_exist.json", flags, out2) == 2);
}

TEST_CASE("the built-in scenario corpus runs clean") {
    scenario::RunFlags flags;
    flags.scenario_dir = NILAB_SCENARIO_DIR;
    auto names = scenario::builtin_scenario_names();
    REQUIRE(names.size() == 5);
    for (const auto& name : names) {
        std::ostringstream out;
        INFO(name);
        CHECK(scenario::run_scenario(name, flags, out) == 0);
    }
    std::ostringstream out;
    CHECK(scenario::run_scenario("no-such-scenario", flags, out) == 2);
}
