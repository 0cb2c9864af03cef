#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace nilab {

/// Outcome of a single check or construction. Witness payloads are plain JSON
/// values so that every witness can be resubmitted as a replay task and
/// serialized into reports verbatim.
struct Report {
    enum class Verdict { Pass, Fail, Error };

    std::string op;
    Verdict verdict = Verdict::Pass;
    std::string message;
    std::map<std::string, std::int64_t> counts;
    nlohmann::json witness; // object; empty when there is nothing to show
    nlohmann::json values;  // op outputs (step, diameters, tables, ...)

    Report()
        : witness(nlohmann::json::object()), values(nlohmann::json::object()) {}
    explicit Report(std::string op_name)
        : op(std::move(op_name)), witness(nlohmann::json::object()),
          values(nlohmann::json::object()) {}

    bool passed() const { return verdict == Verdict::Pass; }
    bool failed() const { return verdict == Verdict::Fail; }

    Report& fail(const std::string& msg) {
        verdict = Verdict::Fail;
        message = msg;
        return *this;
    }
    Report& error(const std::string& msg) {
        verdict = Verdict::Error;
        message = msg;
        return *this;
    }

    static const char* verdict_name(Verdict v) {
        switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "error";
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["op"] = op;
        j["verdict"] = verdict_name(verdict);
        if (!message.empty()) j["message"] = message;
        if (!counts.empty()) j["counts"] = counts;
        if (!witness.empty()) j["witness"] = witness;
        if (!values.empty()) j["values"] = values;
        return j;
    }
};

} // namespace nilab
