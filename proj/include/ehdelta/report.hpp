#pragma once

// Structured outcome of an identity/inequality check.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ehd {

enum class CheckStatus { Pass, Fail, ReportOnly };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        case CheckStatus::ReportOnly: return "REPORT-ONLY";
    }
    return "?";
}

struct VerifyEntry {
    std::string check_id;
    CheckStatus status = CheckStatus::Pass;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    std::string witness;
};

/// lhs <= rhs + tol.
inline VerifyEntry check_le(std::string id, double lhs, double rhs, double tol, std::string witness = {}) {
    const bool ok = lhs <= rhs + tol;
    return {std::move(id), ok ? CheckStatus::Pass : CheckStatus::Fail, lhs, rhs, tol, std::move(witness)};
}

/// |lhs - rhs| <= tol.
inline VerifyEntry check_close(std::string id, double lhs, double rhs, double tol, std::string witness = {}) {
    const bool ok = std::abs(lhs - rhs) <= tol;
    return {std::move(id), ok ? CheckStatus::Pass : CheckStatus::Fail, lhs, rhs, tol, std::move(witness)};
}

/// Outcome of an exact (integer or rational) comparison.
inline VerifyEntry check_exact(std::string id, bool ok, double lhs, double rhs, std::string witness = {}) {
    return {std::move(id), ok ? CheckStatus::Pass : CheckStatus::Fail, lhs, rhs, 0.0, std::move(witness)};
}

inline VerifyEntry report_only(std::string id, double lhs, double rhs, std::string witness = {}) {
    return {std::move(id), CheckStatus::ReportOnly, lhs, rhs, 0.0, std::move(witness)};
}

struct VerifyReport {
    std::string suite;
    std::vector<VerifyEntry> entries;

    void add(VerifyEntry e) { entries.push_back(std::move(e)); }
    void append(const VerifyReport& other) {
        entries.insert(entries.end(), other.entries.begin(), other.entries.end());
    }

    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& e : entries) n += e.status == CheckStatus::Fail;
        return n;
    }
    std::size_t count(CheckStatus s) const {
        std::size_t n = 0;
        for (const auto& e : entries) n += e.status == s;
        return n;
    }
    bool passed() const { return failures() == 0; }
};

/// Non-finite doubles become strings so the JSON stays valid.
inline nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline nlohmann::json to_json(const VerifyEntry& e) {
    return {{"check", e.check_id},   {"status", to_string(e.status)}, {"lhs", json_number(e.lhs)},
            {"rhs", json_number(e.rhs)}, {"tolerance", json_number(e.tolerance)}, {"witness", e.witness}};
}

/// Full report; `max_entries` keeps sweeps with 10^5 checks readable by
/// listing every FAIL and REPORT-ONLY entry but only the first PASS entries.
inline nlohmann::json to_json(const VerifyReport& r, std::size_t max_pass_entries = SIZE_MAX) {
    nlohmann::json entries = nlohmann::json::array();
    std::size_t shown_pass = 0;
    for (const auto& e : r.entries) {
        if (e.status == CheckStatus::Pass && shown_pass++ >= max_pass_entries) continue;
        entries.push_back(to_json(e));
    }
    return {{"suite", r.suite},
            {"status", r.passed() ? "PASS" : "FAIL"},
            {"counts",
             {{"pass", r.count(CheckStatus::Pass)},
              {"fail", r.count(CheckStatus::Fail)},
              {"report_only", r.count(CheckStatus::ReportOnly)}}},
            {"entries", std::move(entries)}};
}

}  // namespace ehd
