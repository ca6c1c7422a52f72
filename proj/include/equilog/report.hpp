#pragma once
// Comparison report assembly and rendering. The JSON field names
// (method, test_set, epsilon, critical_value, statistic, p_value,
// decision) are frozen so downstream diffs stay stable; the text rendering
// mirrors the familiar published table layout, including the
// "Models Differ?" decision column.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "equilog/baseline.hpp"
#include "equilog/csv.hpp"
#include "equilog/equivalence.hpp"
#include "equilog/errors.hpp"

namespace equilog {

inline std::string to_string(EquivDecision d) {
    return d == EquivDecision::Equivalent ? "equivalent" : "not-established";
}
inline std::string to_string(SignifDecision d) {
    return d == SignifDecision::RejectNull ? "reject-null" : "fail-to-reject";
}
inline std::string to_string(PeAlphaConvention c) {
    return c == PeAlphaConvention::PerEq4 ? "per-eq4" : "table-halved";
}
inline PeAlphaConvention pe_convention_from_string(const std::string& s) {
    if (s == "per-eq4") return PeAlphaConvention::PerEq4;
    if (s == "table-halved") return PeAlphaConvention::TableHalved;
    throw ValidationError("unknown pe-alpha-convention: " + s);
}

/// One test row of the report. `models_differ` restates the decision in the
/// table vocabulary: equivalence established or null retained means "No".
struct TestRecord {
    std::string method;    // DE, Deviance, IPE, HosmerLemeshow, PE-lower, ...
    std::string type;      // "equivalence" | "significance"
    std::string test_set;  // "-", "A", "B" (or group names)
    std::optional<double> epsilon;
    std::optional<double> critical_value;
    std::optional<double> statistic;
    std::optional<double> p_value;
    std::optional<long> df;
    std::string decision;
    bool degenerate = false;
    bool models_differ = false;
};

inline TestRecord record_from(const EquivTestResult& r, std::string method,
                              std::string test_set) {
    TestRecord t;
    t.method = std::move(method);
    t.type = "equivalence";
    t.test_set = std::move(test_set);
    t.epsilon = r.epsilon;
    t.critical_value = r.critical_value;
    t.statistic = r.statistic;
    t.p_value = r.p_value;
    t.decision = to_string(r.decision);
    t.degenerate = r.degenerate;
    t.models_differ = r.decision != EquivDecision::Equivalent;
    return t;
}

inline TestRecord record_from(const SignifTestResult& r, std::string method,
                              std::string test_set) {
    TestRecord t;
    t.method = std::move(method);
    t.type = "significance";
    t.test_set = std::move(test_set);
    t.critical_value = r.critical_value;
    t.statistic = r.statistic;
    t.p_value = r.p_value;
    t.df = r.df;
    t.decision = to_string(r.decision);
    t.degenerate = r.degenerate;
    t.models_differ = r.decision == SignifDecision::RejectNull;
    return t;
}

struct ModelSummary {
    std::string name;    // "A" / "B" or group value
    std::string source;  // input file
    Vector beta;
    Vector se;
    bool converged = false;
    double log_likelihood = 0.0;
    std::size_t n_train = 0;
};

struct BrierCell {
    std::string model;
    std::string test_set;
    double score = 0.0;
};

struct ComparisonReport {
    double alpha = 0.05;
    Vector delta_beta;
    double delta_theta = 0.075;
    double delta_b = 1.1;
    std::string pe_alpha_convention = "per-eq4";
    std::string gold = "native";
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
    std::vector<std::string> feature_names;
    ModelSummary model_a, model_b;
    Vector q_hat;
    std::vector<BrierCell> brier;
    std::vector<TestRecord> tests;
};

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

namespace detail {

inline nlohmann::json json_number(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

}  // namespace detail

inline nlohmann::json report_to_json(const ComparisonReport& r) {
    nlohmann::json j;
    j["metadata"] = {
        {"alpha", r.alpha},
        {"delta_beta", r.delta_beta},
        {"delta_theta", r.delta_theta},
        {"delta_b", r.delta_b},
        {"pe_alpha_convention", r.pe_alpha_convention},
        {"gold", r.gold},
        {"seed", r.seed},
    };
    j["metadata"]["inputs"] = nlohmann::json::array();
    for (const auto& [path, digest] : r.inputs)
        j["metadata"]["inputs"].push_back({{"path", path}, {"digest", digest}});
    j["feature_names"] = r.feature_names;
    auto model_json = [](const ModelSummary& m) {
        return nlohmann::json{{"name", m.name},
                              {"source", m.source},
                              {"beta", m.beta},
                              {"se", m.se},
                              {"converged", m.converged},
                              {"log_likelihood", m.log_likelihood},
                              {"n_train", m.n_train}};
    };
    j["models"] = {{"A", model_json(r.model_a)}, {"B", model_json(r.model_b)}};
    j["q_hat"] = r.q_hat;
    j["brier_scores"] = nlohmann::json::array();
    for (const auto& b : r.brier)
        j["brier_scores"].push_back(
            {{"model", b.model}, {"test_set", b.test_set}, {"score", b.score}});
    j["tests"] = nlohmann::json::array();
    for (const auto& t : r.tests) {
        nlohmann::json tj{{"method", t.method},
                          {"type", t.type},
                          {"test_set", t.test_set},
                          {"epsilon", detail::json_number(t.epsilon)},
                          {"critical_value", detail::json_number(t.critical_value)},
                          {"statistic", detail::json_number(t.statistic)},
                          {"p_value", detail::json_number(t.p_value)},
                          {"decision", t.decision},
                          {"degenerate", t.degenerate},
                          {"models_differ", t.models_differ}};
        if (t.df) tj["df"] = *t.df;
        j["tests"].push_back(std::move(tj));
    }
    return j;
}

namespace detail {

inline std::string fixed3(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << *v;
    return os.str();
}

inline std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s += std::string(w - s.size(), ' ');
    return s;
}

}  // namespace detail

inline std::string report_to_text(const ComparisonReport& r) {
    std::ostringstream os;
    os << "Model comparison (alpha=" << format_double(r.alpha) << ")\n\n";
    auto print_model = [&](const ModelSummary& m) {
        os << "Model " << m.name << " [" << m.source << "], n=" << m.n_train
           << ", log-likelihood=" << detail::fixed3(m.log_likelihood) << "\n";
        os << "  " << detail::pad("coefficient", 16) << detail::pad("estimate", 12)
           << "std.err\n";
        for (std::size_t j = 0; j < m.beta.size(); ++j)
            os << "  " << detail::pad(r.feature_names[j], 16)
               << detail::pad(detail::fixed3(m.beta[j]), 12) << detail::fixed3(m.se[j])
               << "\n";
    };
    print_model(r.model_a);
    print_model(r.model_b);
    os << "  " << detail::pad("q_hat", 16);
    for (std::size_t j = 0; j < r.q_hat.size(); ++j)
        os << detail::fixed3(r.q_hat[j]) << (j + 1 < r.q_hat.size() ? " " : "\n");

    if (!r.brier.empty()) {
        os << "\nBrier scores\n";
        for (const auto& b : r.brier)
            os << "  model " << b.model << " on test set " << b.test_set << ": "
               << detail::fixed3(b.score) << "\n";
    }

    os << "\n"
       << detail::pad("Method", 22) << detail::pad("Type", 8) << detail::pad("Test Set", 10)
       << detail::pad("epsilon", 10) << detail::pad("C_alpha", 10)
       << detail::pad("Test Stat.", 12) << detail::pad("P-value", 9) << "Models Differ?\n";
    os << std::string(95, '-') << "\n";
    for (const auto& t : r.tests) {
        if (t.method == "PE-combined") continue;  // the two one-sided rows carry it
        const bool upper_part = t.method == "PE-upper";
        os << detail::pad(t.method, 22) << detail::pad(t.type == "equivalence" ? "Equiv." : "Signif.", 8)
           << detail::pad(upper_part ? "" : t.test_set, 10)
           << detail::pad(upper_part ? "" : detail::fixed3(t.epsilon), 10)
           << detail::pad(detail::fixed3(t.critical_value), 10)
           << detail::pad(detail::fixed3(t.statistic), 12)
           << detail::pad(detail::fixed3(t.p_value), 9);
        if (t.method == "PE-lower") {
            // decision is reported on the pair
            bool differ = true;
            for (const auto& u : r.tests)
                if (u.method == "PE-combined" && u.test_set == t.test_set)
                    differ = u.models_differ;
            os << (differ ? "Yes" : "No");
        } else if (upper_part) {
            // blank: covered by the PE-lower row
        } else {
            os << (t.models_differ ? "Yes" : "No");
        }
        if (t.degenerate) os << "  (degenerate)";
        os << "\n";
    }
    return os.str();
}

}  // namespace equilog
