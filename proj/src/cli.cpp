#include "icl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "icl/scoring.hpp"
#include "icl/verify.hpp"

namespace icl {
namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("CSV: not a number: '" + s + "'");
    }
    if (pos != s.size()) throw std::runtime_error("CSV: trailing characters in '" + s + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("CSV: non-finite value '" + s + "'");
    return v;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

Json battery_to_json(const BatteryResult& r) {
    Json j;
    j["pass"] = r.pass;
    j["checked"] = r.checked;
    j["failures"] = r.failures;
    j["instance_seeds"] = r.seeds;
    return j;
}

std::vector<double> report_levels(const IclFit& fit) {
    std::vector<double> levels;
    for (int k = 1; k <= 19; ++k) levels.push_back(k * 0.05);
    for (double v : fit.cdf)
        if (v > 1e-12 && v < 1.0 - 1e-12) levels.push_back(v);
    return unique_sorted(std::move(levels));
}

}  // namespace

FiniteSpace Dataset::space() const { return FiniteSpace::with_weights(weights); }

Dataset load_csv(const std::string& path, const std::string& weight_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV: empty file " + path);
    const auto header = split_csv_line(line);
    int y_col = -1, w_col = -1;
    std::vector<int> cov_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "y") y_col = static_cast<int>(c);
        else if (!weight_column.empty() && header[c] == weight_column) w_col = static_cast<int>(c);
        else cov_cols.push_back(static_cast<int>(c));
    }
    if (y_col < 0) throw std::invalid_argument("CSV: missing response column 'y'");
    if (!weight_column.empty() && w_col < 0)
        throw std::invalid_argument("CSV: missing weight column '" + weight_column + "'");
    if (cov_cols.empty()) throw std::invalid_argument("CSV: no covariate columns");

    Dataset data;
    for (int c : cov_cols) data.covariate_names.push_back(header[static_cast<std::size_t>(c)]);
    std::vector<double> raw_weights;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("CSV: row has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(header.size()));
        for (const auto& f : fields)
            if (f.empty()) throw std::invalid_argument("CSV: missing value");
        data.y.push_back(parse_number(fields[static_cast<std::size_t>(y_col)]));
        raw_weights.push_back(w_col >= 0 ? parse_number(fields[static_cast<std::size_t>(w_col)]) : 1.0);
        for (int c : cov_cols) data.covariates.data.push_back(parse_number(fields[static_cast<std::size_t>(c)]));
    }
    data.covariates.rows = static_cast<int>(data.y.size());
    data.covariates.cols = static_cast<int>(cov_cols.size());
    if (data.covariates.rows < 1) throw std::invalid_argument("CSV: no data rows");
    data.covariates.validate();

    double total = 0.0;
    for (double w : raw_weights) {
        if (!(w > 0.0)) throw std::invalid_argument("weights must be strictly positive");
        total += w;
    }
    for (double w : raw_weights) data.weights.push_back(w / total);
    return data;
}

OrderSpec OrderSpec::parse(const std::string& text) {
    OrderSpec spec;
    if (text.empty() || text == "componentwise") {
        spec.kind = Kind::componentwise;
        return spec;
    }
    if (text.rfind("column:", 0) == 0) {
        spec.kind = Kind::column;
        spec.column = std::stoi(text.substr(7));
        return spec;
    }
    if (text.rfind("file:", 0) == 0) {
        spec.kind = Kind::file;
        spec.path = text.substr(5);
        return spec;
    }
    throw std::invalid_argument("unknown order spec '" + text + "'");
}

std::string OrderSpec::describe() const {
    switch (kind) {
        case Kind::componentwise: return "componentwise";
        case Kind::column: return "column:" + std::to_string(column);
        case Kind::file: return "file:" + path;
    }
    return "";
}

Preorder build_order(const Dataset& data, const OrderSpec& spec) {
    switch (spec.kind) {
        case OrderSpec::Kind::componentwise:
            return preorder_from_covariates(data.covariates);
        case OrderSpec::Kind::column: {
            if (spec.column < 0 || spec.column >= data.covariates.cols)
                throw std::invalid_argument("order column out of range");
            CovariateTable t;
            t.rows = data.covariates.rows;
            t.cols = 1;
            for (int i = 0; i < t.rows; ++i) t.data.push_back(data.covariates.at(i, spec.column));
            return preorder_from_covariates(t);
        }
        case OrderSpec::Kind::file: {
            std::ifstream in(spec.path);
            if (!in) throw std::runtime_error("cannot open order file " + spec.path);
            std::vector<std::pair<int, int>> edges;
            int i, j;
            while (in >> i >> j) edges.emplace_back(i, j);
            return Preorder::from_edges(data.covariates.rows, edges);
        }
    }
    throw std::logic_error("unreachable");
}

Json step_cdf_to_json(const StepCdf& f) {
    Json j;
    j["points"] = f.points;
    std::vector<double> masses;
    for (int k = 0; k < f.jumps(); ++k) masses.push_back(f.mass_at(k));
    j["masses"] = masses;
    return j;
}

StepCdf step_cdf_from_json(const Json& j) {
    const auto points = j.at("points").get<std::vector<double>>();
    const auto masses = j.at("masses").get<std::vector<double>>();
    if (points.size() != masses.size()) throw std::runtime_error("cdf json: size mismatch");
    std::vector<std::pair<double, double>> pm;
    for (std::size_t k = 0; k < points.size(); ++k) pm.emplace_back(points[k], masses[k]);
    return StepCdf::from_points_masses(std::move(pm));
}

Json preorder_to_json(const Preorder& order) {
    Json j;
    j["n"] = order.n;
    Json pairs = Json::array();
    for (int i = 0; i < order.n; ++i)
        for (int k = 0; k < order.n; ++k)
            if (i != k && order.leq(i, k)) pairs.push_back(Json::array({i, k}));
    j["pairs"] = pairs;
    return j;
}

Preorder preorder_from_json(const Json& j) {
    const int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& p : j.at("pairs")) edges.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    return Preorder::from_edges(n, edges);
}

Json instance_to_json(const CounterexampleInstance& inst) {
    Json j;
    j["schema"] = kSchemaTag;
    j["kind"] = "counterexample";
    j["property"] = to_string(inst.kind);
    j["seed"] = inst.seed;
    Json body;
    body["n"] = inst.space.n;
    body["weights"] = inst.space.weights;
    body["order"] = preorder_to_json(inst.order);
    body["y"] = inst.y;
    if (!inst.y2.empty()) body["y2"] = inst.y2;
    if (inst.order2) body["order2"] = preorder_to_json(*inst.order2);
    if (!inst.forecasts.empty()) {
        Json fc = Json::array();
        for (const auto& f : inst.forecasts) fc.push_back(step_cdf_to_json(f));
        body["forecasts"] = fc;
    }
    j["instance"] = body;
    return j;
}

CounterexampleInstance instance_from_json(const Json& j) {
    CounterexampleInstance inst;
    const auto kind = counterexample_kind_from_string(j.at("property").get<std::string>());
    if (!kind) throw std::runtime_error("unknown counterexample property");
    inst.kind = *kind;
    inst.seed = j.at("seed").get<std::uint64_t>();
    const Json& body = j.at("instance");
    inst.space = FiniteSpace::with_weights(body.at("weights").get<std::vector<double>>());
    inst.order = preorder_from_json(body.at("order"));
    inst.y = body.at("y").get<std::vector<double>>();
    if (body.contains("y2")) inst.y2 = body.at("y2").get<std::vector<double>>();
    if (body.contains("order2")) inst.order2 = preorder_from_json(body.at("order2"));
    if (body.contains("forecasts"))
        for (const auto& f : body.at("forecasts")) inst.forecasts.push_back(step_cdf_from_json(f));
    return inst;
}

Json fit_to_json(const IclFit& fit) {
    Json j;
    j["n"] = fit.n;
    j["thresholds"] = fit.thresholds;
    Json rows = Json::array();
    for (int i = 0; i < fit.n; ++i) {
        std::vector<double> row;
        for (int k = 0; k < fit.threshold_count(); ++k) row.push_back(fit.at(i, k));
        rows.push_back(row);
    }
    j["cdf"] = rows;
    j["order"] = preorder_to_json(fit.order);
    return j;
}

ForecastProfile profile_from_fit_json(const Json& fit_json, const FiniteSpace& space,
                                      const std::vector<double>& y) {
    const int n = fit_json.at("n").get<int>();
    if (n != space.n) throw std::invalid_argument("fit report does not match the dataset size");
    const auto thresholds = fit_json.at("thresholds").get<std::vector<double>>();
    ForecastProfile profile;
    profile.space = space;
    profile.y = y;
    const Json& rows = fit_json.at("cdf");
    for (int i = 0; i < n; ++i) {
        const auto row = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
        if (row.size() != thresholds.size()) throw std::runtime_error("fit report: ragged cdf");
        std::vector<std::pair<double, double>> pm;
        double prev = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row[k] > prev + 1e-13) pm.emplace_back(thresholds[k], row[k] - prev);
            prev = row[k];
        }
        profile.forecasts.push_back(StepCdf::from_points_masses(std::move(pm)));
    }
    return profile;
}

std::string emit_report(const Json& report, const std::string& out_path) {
    const std::string text = report.dump(2) + "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << text;
    }
    return text;
}

int cmd_fit(const FitOptions& opt, Json& report) {
    Timer timer;
    const Dataset data = load_csv(opt.input, opt.weight_column);
    const FiniteSpace space = data.space();
    const Preorder order = build_order(data, opt.order);
    const IclFit fit = icl_fit(space, order, data.y);

    report["schema"] = kSchemaTag;
    report["command"] = "fit";
    report["version"] = kLibraryVersion;
    Json config;
    config["input"] = opt.input;
    config["order"] = opt.order.describe();
    config["weights"] = opt.weight_column;
    report["config"] = config;
    report["fit"] = fit_to_json(fit);

    const auto levels = report_levels(fit);
    Json quantiles;
    quantiles["levels"] = levels;
    Json curves = Json::array();
    for (double alpha : levels) curves.push_back(icl_quantile(fit, alpha));
    quantiles["values"] = curves;
    report["quantiles"] = quantiles;
    report["timing"] = Json{{"seconds", timer.seconds()}};
    return kExitOk;
}

int cmd_score(const ScoreOptions& opt, Json& report) {
    Timer timer;
    const Dataset data = load_csv(opt.input, opt.weight_column);
    const FiniteSpace space = data.space();
    std::ifstream in(opt.fit_path);
    if (!in) throw std::runtime_error("cannot open " + opt.fit_path);
    Json fit_report = Json::parse(in);
    const Json& fit_json = fit_report.contains("fit") ? fit_report.at("fit") : fit_report;
    const ForecastProfile profile = profile_from_fit_json(fit_json, space, data.y);

    double crps_direct = 0.0, crps_quantile = 0.0;
    for (int i = 0; i < space.n; ++i) {
        crps_direct += space.weights[static_cast<std::size_t>(i)] *
                       crps(profile.forecasts[static_cast<std::size_t>(i)], data.y[static_cast<std::size_t>(i)]);
        crps_quantile += space.weights[static_cast<std::size_t>(i)] *
                         crps_via_quantiles(profile.forecasts[static_cast<std::size_t>(i)], data.y[static_cast<std::size_t>(i)]);
    }
    if (std::abs(crps_direct - crps_quantile) > 1e-10)
        throw std::logic_error("CRPS representations disagree");

    std::vector<double> zs;
    for (const auto& f : profile.forecasts) zs.insert(zs.end(), f.points.begin(), f.points.end());
    zs.insert(zs.end(), data.y.begin(), data.y.end());
    zs = unique_sorted(std::move(zs));
    Json brier = Json::array();
    for (double z : zs) {
        double b = 0.0;
        for (int i = 0; i < space.n; ++i)
            b += space.weights[static_cast<std::size_t>(i)] *
                 brier_score(cdf_eval(profile.forecasts[static_cast<std::size_t>(i)], z),
                             data.y[static_cast<std::size_t>(i)] <= z ? 1.0 : 0.0);
        brier.push_back(Json{{"z", z}, {"score", b}});
    }

    std::vector<double> levels;
    for (int k = 1; k <= 19; ++k) levels.push_back(k * 0.05);
    for (const auto& f : profile.forecasts)
        for (double c : f.cum)
            if (c > 1e-12 && c < 1.0 - 1e-12) levels.push_back(c);
    levels = unique_sorted(std::move(levels));
    Json qs = Json::array();
    for (double alpha : levels) {
        double q = 0.0;
        for (int i = 0; i < space.n; ++i)
            q += space.weights[static_cast<std::size_t>(i)] *
                 quantile_score(alpha, lower_quantile(profile.forecasts[static_cast<std::size_t>(i)], alpha),
                                data.y[static_cast<std::size_t>(i)]);
        qs.push_back(Json{{"alpha", alpha}, {"score", q}});
    }

    report["schema"] = kSchemaTag;
    report["command"] = "score";
    report["version"] = kLibraryVersion;
    report["config"] = Json{{"input", opt.input}, {"fit", opt.fit_path}, {"weights", opt.weight_column}};
    report["scores"] = Json{{"mean_crps", crps_direct},
                            {"mean_crps_quantile_form", crps_quantile},
                            {"brier_grid", brier},
                            {"quantile_grid", qs}};
    report["timing"] = Json{{"seconds", timer.seconds()}};
    return kExitOk;
}

namespace {

Json check_to_json(const CheckResult& r) {
    Json j;
    j["ok"] = r.ok;
    if (r.witness) {
        j["witness"] = Json{{"at", r.witness->at},
                            {"group_atom", r.witness->group},
                            {"lhs", r.witness->lhs},
                            {"rhs", r.witness->rhs},
                            {"note", r.witness->note}};
    }
    return j;
}

}  // namespace

int cmd_calibrate(const CalibrateOptions& opt, Json& report) {
    Timer timer;
    const Dataset data = load_csv(opt.input, opt.weight_column);
    std::ifstream in(opt.forecast_path);
    if (!in) throw std::runtime_error("cannot open " + opt.forecast_path);
    Json forecast_report = Json::parse(in);
    const Json& fit_json =
        forecast_report.contains("fit") ? forecast_report.at("fit") : forecast_report;
    const ForecastProfile profile = profile_from_fit_json(fit_json, data.space(), data.y);
    const CalibrationReport calib = run_calibration(profile);

    report["schema"] = kSchemaTag;
    report["command"] = "calibrate";
    report["version"] = kLibraryVersion;
    report["config"] = Json{{"input", opt.input},
                            {"forecast", opt.forecast_path},
                            {"weights", opt.weight_column}};
    report["calibration"] = Json{{"auto", check_to_json(calib.auto_calibration)},
                                 {"isotonic", check_to_json(calib.isotonic)},
                                 {"threshold", check_to_json(calib.threshold)},
                                 {"quantile", check_to_json(calib.quantile)},
                                 {"pit_bounds", check_to_json(calib.pit_bounds)},
                                 {"tolerance", calib.tolerance}};
    report["timing"] = Json{{"seconds", timer.seconds()}};
    return kExitOk;
}

int cmd_verify(const VerifyOptions& opt, Json& report) {
    Timer timer;
    BatteryResult battery;
    if (opt.suite == "universality")
        battery = run_universality_battery(opt.seed, 200, std::min(opt.max_atoms, 6));
    else if (opt.suite == "hierarchy")
        battery = run_hierarchy_battery(opt.seed, 200);
    else if (opt.suite == "oracle")
        battery = run_oracle_battery(opt.seed, 200, std::min(opt.max_atoms, 8));
    else if (opt.suite == "counterexamples")
        battery = run_counterexample_battery(opt.seed, opt.fixtures_dir);
    else
        throw std::invalid_argument("unknown suite '" + opt.suite + "'");

    report["schema"] = kSchemaTag;
    report["command"] = "verify";
    report["version"] = kLibraryVersion;
    report["config"] = Json{{"suite", opt.suite},
                            {"seed", opt.seed},
                            {"n", opt.max_atoms},
                            {"fixtures", opt.fixtures_dir}};
    report["result"] = battery_to_json(battery);
    report["timing"] = Json{{"seconds", timer.seconds()}};
    return battery.pass ? kExitOk : kExitVerifyFailure;
}

}  // namespace icl
