#pragma once
// Command-line front end: `compare` (full cascade comparison report),
// `simulate` (Monte Carlo sweeps to CSV) and `regen` (copula-based data
// regeneration). Configuration files share one line-based format:
// '#' comments, `key = value` entries, `[section ...]` headers, lists
// comma-separated.
//
// Exit codes: 0 success, 2 usage/validation error, 3 numeric failure
// (separation, singular covariance, non-convergence). When the
// EQUILOG_OUT_DIR environment variable is set, relative output paths are
// placed under it.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "equilog/copula.hpp"
#include "equilog/csv.hpp"
#include "equilog/report.hpp"
#include "equilog/simulation.hpp"

namespace equilog::cli {

// ---------------------------------------------------------------------------
// shared config-file format
// ---------------------------------------------------------------------------

struct ConfigEntry {
    int line = 0;
    std::string key, value;
};

struct ConfigSection {
    int line = 0;
    std::string kind, name;  // "[subgroup]" -> kind "subgroup"; leading entries kind ""
    std::vector<ConfigEntry> entries;

    const ConfigEntry* find(const std::string& key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
};

inline std::vector<ConfigSection> parse_config(std::istream& in, const std::string& name) {
    std::vector<ConfigSection> sections;
    sections.push_back(ConfigSection{0, "", "", {}});
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = detail::trim(line);
        if (const auto hash = s.find('#'); hash != std::string::npos)
            s = detail::trim(s.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ValidationError(name + " line " + std::to_string(line_no) +
                                      ": unterminated section header");
            std::istringstream hs(s.substr(1, s.size() - 2));
            ConfigSection sec;
            sec.line = line_no;
            hs >> sec.kind >> sec.name;
            sections.push_back(std::move(sec));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError(name + " line " + std::to_string(line_no) +
                                  ": expected key = value");
        ConfigEntry e;
        e.line = line_no;
        e.key = detail::trim(s.substr(0, eq));
        e.value = detail::trim(s.substr(eq + 1));
        if (e.key.empty())
            throw ValidationError(name + " line " + std::to_string(line_no) + ": empty key");
        sections.back().entries.push_back(std::move(e));
    }
    return sections;
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            out.push_back(detail::trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(detail::trim(cur));
    return out;
}

inline std::vector<double> parse_double_list(const std::string& value, const std::string& where) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(item, where));
    return out;
}

// ---------------------------------------------------------------------------
// scenario grids
// ---------------------------------------------------------------------------

/// Expands a grid file into scenario cells. List-valued keys (n, effect, k,
/// alpha, delta_beta, delta_theta, delta_b or epsilon_b) multiply out in a
/// fixed nesting order: effect, k, n, alpha, delta_beta, delta_theta,
/// performance threshold. delta_beta entries may be ';'-separated
/// per-coefficient vectors. For effect "none" the k list collapses to a
/// single neutral cell.
inline std::vector<ScenarioConfig> grid_from_sections(const std::vector<ConfigSection>& sections,
                                                      const std::string& name) {
    if (sections.size() != 1)
        throw ValidationError(name + ": grid files take only top-level key = value entries");
    const ConfigSection& g = sections.front();
    std::map<std::string, ConfigEntry> seen;
    for (const auto& e : g.entries) {
        if (seen.count(e.key))
            throw ValidationError(name + " line " + std::to_string(e.line) +
                                  ": duplicate key '" + e.key + "'");
        seen[e.key] = e;
        static const std::vector<std::string> known{
            "n",       "p",           "effect",      "k",          "k_sd",
            "replicates", "alpha",    "delta_beta",  "delta_theta", "delta_b",
            "epsilon_b",  "pe_alpha_convention",     "seed"};
        bool ok = false;
        for (const auto& k : known) ok = ok || k == e.key;
        if (!ok)
            throw ValidationError(name + " line " + std::to_string(e.line) +
                                  ": unknown key '" + e.key + "'");
    }
    auto value_of = [&](const std::string& key) -> std::optional<ConfigEntry> {
        const auto it = seen.find(key);
        if (it == seen.end()) return std::nullopt;
        return it->second;
    };
    auto where = [&](const ConfigEntry& e) {
        return name + " line " + std::to_string(e.line);
    };

    std::vector<std::size_t> ns;
    if (const auto e = value_of("n")) {
        for (double v : parse_double_list(e->value, where(*e)))
            ns.push_back(static_cast<std::size_t>(v));
    } else {
        throw ValidationError(name + ": missing required key 'n'");
    }
    std::size_t p = 3;
    if (const auto e = value_of("p")) p = static_cast<std::size_t>(parse_double(e->value, where(*e)));
    std::vector<EffectType> effects{EffectType::None};
    if (const auto e = value_of("effect")) {
        effects.clear();
        for (const auto& item : split_list(e->value)) effects.push_back(effect_from_string(item));
    }
    std::vector<double> ks{1.0};
    if (const auto e = value_of("k")) ks = parse_double_list(e->value, where(*e));
    double k_sd = 0.1;
    if (const auto e = value_of("k_sd")) k_sd = parse_double(e->value, where(*e));
    std::size_t replicates = 1000;
    if (const auto e = value_of("replicates"))
        replicates = static_cast<std::size_t>(parse_double(e->value, where(*e)));
    std::vector<double> alphas{0.05};
    if (const auto e = value_of("alpha")) alphas = parse_double_list(e->value, where(*e));

    std::vector<Vector> delta_betas;
    if (const auto e = value_of("delta_beta")) {
        for (const auto& item : split_list(e->value)) {
            Vector db;
            std::string part;
            std::istringstream is(item);
            while (std::getline(is, part, ';'))
                db.push_back(parse_double(detail::trim(part), where(*e)));
            delta_betas.push_back(std::move(db));
        }
    } else {
        delta_betas.push_back({0.1});
    }
    std::vector<double> delta_thetas{0.075};
    if (const auto e = value_of("delta_theta")) delta_thetas = parse_double_list(e->value, where(*e));
    std::vector<double> delta_bs{1.1};
    bool have_delta_b = false;
    if (const auto e = value_of("delta_b")) {
        delta_bs = parse_double_list(e->value, where(*e));
        have_delta_b = true;
    }
    std::vector<double> epsilon_bs;
    if (const auto e = value_of("epsilon_b")) {
        if (have_delta_b)
            throw ValidationError(where(*e) + ": give either delta_b or epsilon_b, not both");
        epsilon_bs = parse_double_list(e->value, where(*e));
    }
    PeAlphaConvention conv = PeAlphaConvention::PerEq4;
    if (const auto e = value_of("pe_alpha_convention")) conv = pe_convention_from_string(e->value);
    std::uint64_t seed = 0;
    if (const auto e = value_of("seed"))
        seed = static_cast<std::uint64_t>(parse_double(e->value, where(*e)));

    std::vector<ScenarioConfig> grid;
    for (EffectType effect : effects) {
        const std::vector<double> cell_ks =
            effect == EffectType::None ? std::vector<double>{1.0} : ks;
        for (double k : cell_ks)
            for (std::size_t n : ns)
                for (double alpha : alphas)
                    for (const Vector& db : delta_betas)
                        for (double dt : delta_thetas)
                            for (std::size_t pe = 0;
                                 pe < (epsilon_bs.empty() ? delta_bs.size() : epsilon_bs.size());
                                 ++pe) {
                                ScenarioConfig cfg;
                                cfg.n = n;
                                cfg.p = p;
                                cfg.effect = effect;
                                cfg.k = k;
                                cfg.k_sd = k_sd;
                                cfg.replicates = replicates;
                                cfg.alpha = alpha;
                                cfg.levels.delta_beta =
                                    db.size() == 1 ? Vector(p + 1, db[0]) : db;
                                cfg.levels.delta_theta = dt;
                                if (epsilon_bs.empty()) {
                                    cfg.levels.delta_b = delta_bs[pe];
                                } else {
                                    cfg.epsilon_b = epsilon_bs[pe];
                                }
                                cfg.pe_convention = conv;
                                cfg.seed = seed;
                                grid.push_back(std::move(cfg));
                            }
    }
    if (grid.empty()) throw ValidationError(name + ": empty grid");
    return grid;
}

inline std::vector<ScenarioConfig> grid_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open grid file: " + path);
    const auto sections = parse_config(in, path);
    return grid_from_sections(sections, path);
}

/// The published error-rate table: equal models and a strong multiplicative
/// effect (k = 1.5), n in {100, 1000, 10000}, alpha in {0.05, 0.1}, with the
/// strict sensitivity levels 0.2 / 0.05 / 1.005 and the table's per-side
/// alpha/2 performance critical values.
inline std::vector<ScenarioConfig> error_rates_preset(std::size_t replicates, std::uint64_t seed) {
    std::vector<ScenarioConfig> grid;
    for (EffectType effect : {EffectType::None, EffectType::LogOddsMultiplicative})
        for (std::size_t n : {100, 1000, 10000})
            for (double alpha : {0.05, 0.1}) {
                ScenarioConfig cfg;
                cfg.n = n;
                cfg.p = 3;
                cfg.effect = effect;
                cfg.k = effect == EffectType::None ? 1.0 : 1.5;
                cfg.k_sd = 0.1;
                cfg.replicates = replicates;
                cfg.alpha = alpha;
                cfg.levels.delta_beta = Vector(4, 0.2);
                cfg.levels.delta_theta = 0.05;
                cfg.levels.delta_b = 1.005;
                cfg.pe_convention = PeAlphaConvention::TableHalved;
                cfg.seed = seed;
                grid.push_back(std::move(cfg));
            }
    return grid;
}

inline std::string sweep_level_string(const ScenarioConfig& cfg, std::size_t method) {
    if (method == 0) {
        bool uniform = true;
        for (double d : cfg.levels.delta_beta) uniform = uniform && d == cfg.levels.delta_beta[0];
        if (uniform) return format_double(cfg.levels.delta_beta[0]);
        std::string out;
        for (std::size_t j = 0; j < cfg.levels.delta_beta.size(); ++j)
            out += (j ? ";" : "") + format_double(cfg.levels.delta_beta[j]);
        return out;
    }
    if (method == 1) return format_double(cfg.levels.delta_theta);
    if (method == 2)
        return cfg.epsilon_b ? format_double(*cfg.epsilon_b) : format_double(cfg.levels.delta_b);
    return "";
}

/// One CSV row per cell and method:
/// n,effect,k,method,level,rate,replicates,failures
inline std::string sweep_to_csv(const SweepResult& sweep) {
    std::ostringstream os;
    os << "n,effect,k,method,level,rate,replicates,failures\n";
    for (const auto& cell : sweep.cells) {
        for (std::size_t m = 0; m < kMethodCount; ++m) {
            os << cell.config.n << "," << to_string(cell.config.effect) << ","
               << format_double(cell.config.k) << "," << kMethodNames[m] << ","
               << sweep_level_string(cell.config, m) << "," << format_double(cell.rate(m))
               << "," << cell.replicates_done << "," << cell.failures << "\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// copula spec and plan files
// ---------------------------------------------------------------------------

inline void write_copula_specs(std::ostream& out, const std::vector<CopulaSpec>& specs) {
    out << "# equilog copula specs\n";
    for (const auto& s : specs) {
        out << "\n[spec " << s.label << "]\n";
        auto join = [](const Vector& v) {
            std::string r;
            for (std::size_t j = 0; j < v.size(); ++j) r += (j ? ", " : "") + format_double(v[j]);
            return r;
        };
        if (!s.var_names.empty()) {
            out << "variables = ";
            for (std::size_t j = 0; j < s.var_names.size(); ++j)
                out << (j ? ", " : "") << s.var_names[j];
            out << "\n";
        }
        out << "shape = " << join(s.shape) << "\n";
        out << "rate = " << join(s.rate) << "\n";
        out << "offset = " << join(s.offset) << "\n";
        out << "mu = " << join(s.mu) << "\n";
        for (std::size_t i = 0; i < s.sigma.rows(); ++i) {
            Vector row(s.sigma.cols());
            for (std::size_t j = 0; j < s.sigma.cols(); ++j) row[j] = s.sigma(i, j);
            out << "sigma_row = " << join(row) << "\n";
        }
        out << "n_source = " << s.n_source << "\n";
        if (s.sigma_repaired) out << "sigma_repaired = 1\n";
    }
}

inline std::vector<CopulaSpec> read_copula_specs(std::istream& in, const std::string& name) {
    const auto sections = parse_config(in, name);
    std::vector<CopulaSpec> specs;
    for (const auto& sec : sections) {
        if (sec.kind.empty()) {
            if (!sec.entries.empty())
                throw ValidationError(name + " line " + std::to_string(sec.entries[0].line) +
                                      ": entries outside a [spec ...] section");
            continue;
        }
        if (sec.kind != "spec")
            throw ValidationError(name + " line " + std::to_string(sec.line) +
                                  ": unknown section '" + sec.kind + "'");
        if (sec.name.empty())
            throw ValidationError(name + " line " + std::to_string(sec.line) +
                                  ": [spec ...] needs a label");
        CopulaSpec s;
        s.label = sec.name;
        std::vector<Vector> sigma_rows;
        for (const auto& e : sec.entries) {
            const std::string where = name + " line " + std::to_string(e.line);
            if (e.key == "variables") {
                s.var_names = split_list(e.value);
            } else if (e.key == "shape") {
                s.shape = parse_double_list(e.value, where);
            } else if (e.key == "rate") {
                s.rate = parse_double_list(e.value, where);
            } else if (e.key == "offset") {
                s.offset = parse_double_list(e.value, where);
            } else if (e.key == "mu") {
                s.mu = parse_double_list(e.value, where);
            } else if (e.key == "sigma_row") {
                sigma_rows.push_back(parse_double_list(e.value, where));
            } else if (e.key == "n_source") {
                s.n_source = static_cast<std::size_t>(parse_double(e.value, where));
            } else if (e.key == "sigma_repaired") {
                s.sigma_repaired = parse_double(e.value, where) != 0.0;
            } else {
                throw ValidationError(where + ": unknown key '" + e.key + "'");
            }
        }
        const std::size_t d = s.shape.size();
        if (sigma_rows.size() != d)
            throw ValidationError(name + ": spec '" + s.label + "' needs " + std::to_string(d) +
                                  " sigma_row entries, got " + std::to_string(sigma_rows.size()));
        s.sigma = Matrix(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            if (sigma_rows[i].size() != d)
                throw ValidationError(name + ": spec '" + s.label + "' sigma_row " +
                                      std::to_string(i + 1) + " has wrong length");
            for (std::size_t j = 0; j < d; ++j) s.sigma(i, j) = sigma_rows[i][j];
        }
        validate_copula_spec(s);
        specs.push_back(std::move(s));
    }
    if (specs.empty()) throw ValidationError(name + ": no [spec ...] sections");
    return specs;
}

inline RegenPlan read_plan(std::istream& in, const std::string& name) {
    const auto sections = parse_config(in, name);
    RegenPlan plan;
    for (const auto& sec : sections) {
        if (sec.kind.empty()) {
            for (const auto& e : sec.entries) {
                const std::string where = name + " line " + std::to_string(e.line);
                if (e.key == "train_fraction") {
                    plan.train_fraction = parse_double(e.value, where);
                } else {
                    throw ValidationError(where + ": unknown key '" + e.key + "'");
                }
            }
            continue;
        }
        if (sec.kind != "subgroup")
            throw ValidationError(name + " line " + std::to_string(sec.line) +
                                  ": unknown section '" + sec.kind + "'");
        RegenSubgroup sg;
        for (const auto& e : sec.entries) {
            const std::string where = name + " line " + std::to_string(e.line);
            if (e.key == "spec") {
                sg.spec_label = e.value;
            } else if (e.key == "group") {
                sg.group = e.value;
            } else if (e.key == "label") {
                sg.label = static_cast<int>(parse_double(e.value, where));
            } else if (e.key == "n") {
                sg.n = static_cast<std::size_t>(parse_double(e.value, where));
            } else {
                throw ValidationError(where + ": unknown key '" + e.key + "'");
            }
        }
        if (sg.group.empty())
            throw ValidationError(name + " line " + std::to_string(sec.line) +
                                  ": subgroup needs a group");
        if (sg.spec_label.empty())
            sg.spec_label = sg.group + ":" + std::to_string(sg.label);
        plan.subgroups.push_back(std::move(sg));
    }
    validate_plan(plan);
    return plan;
}

// ---------------------------------------------------------------------------
// output path handling
// ---------------------------------------------------------------------------

inline std::string resolve_out_path(const std::string& path) {
    const char* base = std::getenv("EQUILOG_OUT_DIR");
    if (base == nullptr || *base == '\0') return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base) / p).string();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    const std::string resolved = resolve_out_path(path);
    if (const auto parent = std::filesystem::path(resolved).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream out(resolved, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + resolved);
    out << content;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string train_a, train_b;        // two-file mode
    std::string data, group;             // single-file mode
    std::string group_a, group_b;        // optional explicit group values
    std::string test_a, test_b, test;    // test sets (single-file mode uses `test`)
    std::string response = "y";
    double alpha = 0.05;
    std::string delta_beta = "0.1";      // scalar or comma list over coefficients
    double delta_theta = 0.075;
    double delta_b = 1.1;
    std::string gold = "native";
    std::string pe_alpha_convention = "per-eq4";
    std::uint64_t seed = 0;
    std::string out = "report.json";
};

namespace detail_cli {

struct TestSetData {
    std::string name;
    char native_model = 'A';
    Matrix x;  // with intercept
    std::vector<int> y;
};

inline TestSetData test_set_from_table(const CsvTable& t, const std::string& name,
                                       char native_model, const std::string& response,
                                       const std::vector<std::string>& feature_names,
                                       const std::string& group_column = "",
                                       const std::string& group_value = "") {
    const Dataset d = dataset_from_table(t, response, group_column, group_value);
    if (d.feature_names != feature_names)
        throw ValidationError("test set '" + name +
                              "': covariate columns do not match the training data");
    return TestSetData{name, native_model, d.X, d.y};
}

}  // namespace detail_cli

/// Runs the whole comparison: fits both models, then DE and the deviance
/// test, and per test set IPE, Hosmer-Lemeshow, the PE pair and the Brier
/// t-test.
inline ComparisonReport compare_models(const Dataset& train_a, const Dataset& train_b,
                                       const std::vector<detail_cli::TestSetData>& test_sets,
                                       const CompareArgs& args) {
    if (train_a.feature_names != train_b.feature_names)
        throw ValidationError("training sets have different covariate columns");
    const std::size_t p = train_a.p();

    Vector delta_beta;
    {
        const std::vector<double> raw =
            parse_double_list(args.delta_beta, "--delta-beta");
        if (raw.size() == 1)
            delta_beta = Vector(p, raw[0]);
        else if (raw.size() == p)
            delta_beta = Vector(raw.begin(), raw.end());
        else
            throw ValidationError("--delta-beta needs 1 or " + std::to_string(p) +
                                  " values (intercept included), got " +
                                  std::to_string(raw.size()));
    }
    SensitivityLevels levels;
    levels.delta_beta = delta_beta;
    levels.delta_theta = args.delta_theta;
    levels.delta_b = args.delta_b;
    validate_levels(levels);
    const PeAlphaConvention conv = pe_convention_from_string(args.pe_alpha_convention);
    if (args.gold != "native" && args.gold != "A" && args.gold != "B")
        throw ValidationError("--gold must be native, A or B");

    const FittedModel model_a = fit_logistic(train_a);
    const FittedModel model_b = fit_logistic(train_b);

    ComparisonReport report;
    report.alpha = args.alpha;
    report.delta_beta = delta_beta;
    report.delta_theta = args.delta_theta;
    report.delta_b = args.delta_b;
    report.pe_alpha_convention = args.pe_alpha_convention;
    report.gold = args.gold;
    report.seed = args.seed;
    report.feature_names = train_a.feature_names;

    auto summarize = [&](const FittedModel& m, const std::string& name,
                         const std::string& source) {
        ModelSummary s;
        s.name = name;
        s.source = source;
        s.beta = m.beta;
        s.se.resize(m.beta.size());
        for (std::size_t j = 0; j < m.beta.size(); ++j)
            s.se[j] = std::sqrt(m.cov.matrix()(j, j));
        s.converged = m.converged;
        s.log_likelihood = m.log_likelihood;
        s.n_train = m.n_train;
        return s;
    };
    report.model_a = summarize(model_a, "A", args.data.empty() ? args.train_a : args.group_a);
    report.model_b = summarize(model_b, "B", args.data.empty() ? args.train_b : args.group_b);
    report.q_hat.resize(p);
    for (std::size_t j = 0; j < p; ++j) report.q_hat[j] = model_a.beta[j] - model_b.beta[j];

    report.tests.push_back(
        record_from(descriptive_equivalence(model_a, model_b, levels, args.alpha), "DE", "-"));
    report.tests.push_back(
        record_from(deviance_test(train_a, train_b, args.alpha), "Deviance", "-"));

    for (const auto& ts : test_sets) {
        const PredictionSet pred_a = predict(model_a, ts.x);
        const PredictionSet pred_b = predict(model_b, ts.x);
        const Vector& gold_theta = args.gold == "A"  ? pred_a.theta
                                   : args.gold == "B" ? pred_b.theta
                                   : ts.native_model == 'A' ? pred_a.theta
                                                            : pred_b.theta;
        const double eps_theta = ipe_threshold(gold_theta, args.delta_theta);
        const IpeResult ipe =
            individual_predictive_equivalence(pred_a.theta, pred_b.theta, eps_theta, args.alpha);
        report.tests.push_back(record_from(ipe.result, "IPE", ts.name));

        const Vector& foreign_pi = ts.native_model == 'A' ? pred_b.pi : pred_a.pi;
        report.tests.push_back(
            record_from(hosmer_lemeshow(foreign_pi, ts.y, 10, args.alpha), "HosmerLemeshow",
                        ts.name));

        const PeResult pe = performance_equivalence(pred_a.pi, pred_b.pi, ts.y,
                                                    pe_threshold(args.delta_b), args.alpha, conv);
        report.tests.push_back(record_from(pe.lower, "PE-lower", ts.name));
        report.tests.push_back(record_from(pe.upper, "PE-upper", ts.name));
        report.tests.push_back(record_from(pe.combined, "PE-combined", ts.name));

        report.tests.push_back(
            record_from(brier_t_test(pred_a.pi, pred_b.pi, ts.y, args.alpha), "BrierT", ts.name));

        report.brier.push_back({"A", ts.name, brier_score(pred_a.pi, ts.y).score});
        report.brier.push_back({"B", ts.name, brier_score(pred_b.pi, ts.y).score});
    }
    return report;
}

inline int run_compare(const CompareArgs& args, std::ostream& out) {
    detail::check_probability(args.alpha, "--alpha");
    const bool two_file = !args.train_a.empty() || !args.train_b.empty();
    const bool group_mode = !args.data.empty();
    if (two_file == group_mode)
        throw ValidationError("give either --a and --b, or --data with --group");

    ComparisonReport report;
    std::vector<std::pair<std::string, std::string>> inputs;
    if (two_file) {
        if (args.train_a.empty() || args.train_b.empty())
            throw ValidationError("--a and --b are both required");
        const Dataset a = dataset_from_table(read_csv_file(args.train_a), args.response);
        const Dataset b = dataset_from_table(read_csv_file(args.train_b), args.response);
        inputs.emplace_back(args.train_a, file_digest(args.train_a));
        inputs.emplace_back(args.train_b, file_digest(args.train_b));
        std::vector<detail_cli::TestSetData> tests;
        if (!args.test_a.empty()) {
            tests.push_back(detail_cli::test_set_from_table(
                read_csv_file(args.test_a), "A", 'A', args.response, a.feature_names));
            inputs.emplace_back(args.test_a, file_digest(args.test_a));
        }
        if (!args.test_b.empty()) {
            tests.push_back(detail_cli::test_set_from_table(
                read_csv_file(args.test_b), "B", 'B', args.response, a.feature_names));
            inputs.emplace_back(args.test_b, file_digest(args.test_b));
        }
        report = compare_models(a, b, tests, args);
    } else {
        if (args.group.empty()) throw ValidationError("--data requires --group");
        const CsvTable t = read_csv_file(args.data);
        inputs.emplace_back(args.data, file_digest(args.data));
        std::string ga = args.group_a, gb = args.group_b;
        if (ga.empty() || gb.empty()) {
            std::vector<std::string> values;
            const std::size_t gi = t.column(args.group);
            for (const auto& row : t.rows)
                if (std::find(values.begin(), values.end(), row[gi]) == values.end())
                    values.push_back(row[gi]);
            std::sort(values.begin(), values.end());
            if (values.size() != 2)
                throw ValidationError("--group column '" + args.group + "' has " +
                                      std::to_string(values.size()) +
                                      " distinct values; give --group-a/--group-b");
            ga = values[0];
            gb = values[1];
        }
        CompareArgs named = args;
        named.group_a = ga;
        named.group_b = gb;
        const Dataset a = dataset_from_table(t, args.response, args.group, ga);
        const Dataset b = dataset_from_table(t, args.response, args.group, gb);
        std::vector<detail_cli::TestSetData> tests;
        if (!args.test.empty()) {
            const CsvTable tt = read_csv_file(args.test);
            inputs.emplace_back(args.test, file_digest(args.test));
            tests.push_back(detail_cli::test_set_from_table(tt, ga, 'A', args.response,
                                                            a.feature_names, args.group, ga));
            tests.push_back(detail_cli::test_set_from_table(tt, gb, 'B', args.response,
                                                            a.feature_names, args.group, gb));
        }
        report = compare_models(a, b, tests, named);
    }
    report.inputs = std::move(inputs);

    write_text_file(args.out, report_to_json(report).dump(2) + "\n");
    out << report_to_text(report);
    out << "\nreport written to " << resolve_out_path(args.out) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string grid;    // grid file
    std::string preset;  // or a named preset
    std::optional<std::size_t> replicates;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out = "sweep.csv";
};

inline int run_simulate(const SimulateArgs& args, std::ostream& err) {
    if (args.grid.empty() == args.preset.empty())
        throw ValidationError("give exactly one of --grid or --preset");
    std::vector<ScenarioConfig> grid;
    if (!args.grid.empty()) {
        grid = grid_from_file(args.grid);
    } else if (args.preset == "error-rates") {
        grid = error_rates_preset(args.replicates.value_or(1000), args.seed.value_or(0));
    } else {
        throw ValidationError("unknown preset '" + args.preset + "' (available: error-rates)");
    }
    for (auto& cfg : grid) {
        if (args.replicates) cfg.replicates = *args.replicates;
        if (args.seed) cfg.seed = *args.seed;
    }
    err << "running " << grid.size() << " scenario cells, " << grid.front().replicates
        << " replicates each\n";
    const SweepResult result = sweep(grid, args.threads);
    write_text_file(args.out, sweep_to_csv(result));
    err << "sweep written to " << resolve_out_path(args.out) << "\n";
    for (const auto& [idx, message] : result.errors)
        err << "cell " << idx << " failed: " << message << "\n";
    if (!result.errors.empty())
        throw NumericError(std::to_string(result.errors.size()) + " of " +
                           std::to_string(grid.size()) + " cells failed");
    return 0;
}

// ---------------------------------------------------------------------------
// regen
// ---------------------------------------------------------------------------

struct RegenArgs {
    std::string plan;
    std::string specs;  // spec-file mode
    std::string data;   // estimation mode
    std::string group;
    std::string response = "y";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir = "regen";
};

inline int run_regen(const RegenArgs& args, std::ostream& out) {
    if (args.plan.empty()) throw ValidationError("--plan is required");
    if (args.specs.empty() == args.data.empty())
        throw ValidationError("give exactly one of --specs or --data");
    std::ifstream plan_in(args.plan);
    if (!plan_in) throw ValidationError("cannot open plan file: " + args.plan);
    const RegenPlan plan = read_plan(plan_in, args.plan);

    std::vector<CopulaSpec> specs;
    if (!args.specs.empty()) {
        std::ifstream in(args.specs);
        if (!in) throw ValidationError("cannot open spec file: " + args.specs);
        specs = read_copula_specs(in, args.specs);
    } else {
        if (args.group.empty()) throw ValidationError("--data requires --group");
        const CsvTable t = read_csv_file(args.data);
        const std::size_t gi = t.column(args.group);
        const std::size_t ri = t.column(args.response);
        std::vector<std::size_t> score_cols;
        std::vector<std::string> names;
        for (std::size_t j = 0; j < t.header.size(); ++j) {
            if (j == gi || j == ri) continue;
            score_cols.push_back(j);
            names.push_back(t.header[j]);
        }
        for (const auto& sg : plan.subgroups) {
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                if (t.rows[i][gi] != sg.group) continue;
                const std::string where = "row " + std::to_string(i + 2);
                const double yv = parse_double(t.rows[i][ri], where);
                if (static_cast<int>(yv) != sg.label) continue;
                keep.push_back(i);
            }
            if (keep.size() < 2)
                throw ValidationError("subgroup " + sg.group + "/" +
                                      std::to_string(sg.label) +
                                      ": fewer than 2 matching rows in " + args.data);
            Matrix scores(keep.size(), score_cols.size());
            for (std::size_t r = 0; r < keep.size(); ++r)
                for (std::size_t c = 0; c < score_cols.size(); ++c)
                    scores(r, c) = parse_double(t.rows[keep[r]][score_cols[c]],
                                                "row " + std::to_string(keep[r] + 2));
            specs.push_back(estimate_copula(scores, sg.spec_label, names));
        }
    }

    const std::vector<GroupData> groups =
        build_splits(plan, specs, RngStream(args.seed, 0), args.threads);

    std::ostringstream spec_text;
    write_copula_specs(spec_text, specs);
    const std::string dir = args.out_dir;
    write_text_file(dir + "/copula_specs.txt", spec_text.str());
    out << "wrote " << resolve_out_path(dir + "/copula_specs.txt") << "\n";
    for (const auto& g : groups) {
        for (const auto& [suffix, data] :
             {std::pair<const char*, const Dataset*>{"train", &g.train}, {"test", &g.test}}) {
            std::ostringstream csv;
            write_csv(csv, dataset_to_table(*data, args.response));
            const std::string path = dir + "/" + g.group + "_" + suffix + ".csv";
            write_text_file(path, csv.str());
            out << "wrote " << resolve_out_path(path) << " (" << data->n() << " rows)\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{
        "equilog: equivalence testing for logistic regression models across "
        "sub-populations"};
    app.require_subcommand(1);
    app.footer(
        "Relative output paths are placed under $EQUILOG_OUT_DIR when it is set.");

    CompareArgs cargs;
    CLI::App* cmp = app.add_subcommand(
        "compare", "fit two models and run the equivalence cascade plus baselines");
    cmp->add_option("--a", cargs.train_a, "training CSV for model A");
    cmp->add_option("--b", cargs.train_b, "training CSV for model B");
    cmp->add_option("--data", cargs.data, "single CSV holding both groups");
    cmp->add_option("--group", cargs.group, "group column for --data mode");
    cmp->add_option("--group-a", cargs.group_a, "group value fitted as model A");
    cmp->add_option("--group-b", cargs.group_b, "group value fitted as model B");
    cmp->add_option("--test-a", cargs.test_a, "test CSV for population A");
    cmp->add_option("--test-b", cargs.test_b, "test CSV for population B");
    cmp->add_option("--test", cargs.test, "test CSV with group column (--data mode)");
    cmp->add_option("--response", cargs.response, "response column name")
        ->capture_default_str();
    cmp->add_option("--alpha", cargs.alpha, "significance level")->capture_default_str();
    cmp->add_option("--delta-beta", cargs.delta_beta,
                    "allowed per-coefficient difference (scalar or comma list)")
        ->capture_default_str();
    cmp->add_option("--delta-theta", cargs.delta_theta,
                    "quantile of |log-odds| setting the IPE threshold")
        ->capture_default_str();
    cmp->add_option("--delta-b", cargs.delta_b, "allowed Brier error inflation factor")
        ->capture_default_str();
    cmp->add_option("--gold", cargs.gold, "gold-standard predictions: native, A or B")
        ->capture_default_str();
    cmp->add_option("--pe-alpha-convention", cargs.pe_alpha_convention,
                    "per-eq4 (t_{1-a}) or table-halved (t_{1-a/2})")
        ->capture_default_str();
    cmp->add_option("--seed", cargs.seed, "seed recorded in the report")
        ->capture_default_str();
    cmp->add_option("--out", cargs.out, "report JSON path")->capture_default_str();

    SimulateArgs sargs;
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo sweep over scenario grids");
    sim->add_option("--grid", sargs.grid, "scenario grid file");
    sim->add_option("--preset", sargs.preset, "named preset grid (error-rates)");
    std::size_t reps_opt = 0;
    std::uint64_t seed_opt = 0;
    CLI::Option* reps_flag =
        sim->add_option("--replicates", reps_opt, "override replicate count");
    CLI::Option* seed_flag = sim->add_option("--seed", seed_opt, "override scenario seed");
    sim->add_option("--threads", sargs.threads, "worker threads for replicates")
        ->capture_default_str();
    sim->add_option("--out", sargs.out, "sweep CSV path")->capture_default_str();

    RegenArgs rargs;
    CLI::App* reg = app.add_subcommand("regen", "regenerate synthetic datasets from a copula");
    reg->add_option("--plan", rargs.plan, "regeneration plan file")->required();
    reg->add_option("--specs", rargs.specs, "copula spec file");
    reg->add_option("--data", rargs.data, "raw CSV to estimate specs from");
    reg->add_option("--group", rargs.group, "group column for --data mode");
    reg->add_option("--response", rargs.response, "response column name")
        ->capture_default_str();
    reg->add_option("--seed", rargs.seed, "regeneration seed")->capture_default_str();
    reg->add_option("--threads", rargs.threads, "worker threads for subgroups")
        ->capture_default_str();
    reg->add_option("--out-dir", rargs.out_dir, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (reps_flag->count() > 0) sargs.replicates = reps_opt;
        if (seed_flag->count() > 0) sargs.seed = seed_opt;
        if (cmp->parsed()) return run_compare(cargs, std::cout);
        if (sim->parsed()) return run_simulate(sargs, std::cerr);
        if (reg->parsed()) return run_regen(rargs, std::cout);
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SeparationError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace equilog::cli
