#include "linresp/cli.hpp"

#include "linresp/error.hpp"
#include "linresp/experiments.hpp"
#include "linresp/matrix_io.hpp"
#include "linresp/sequential.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef LINRESP_VERSION
#define LINRESP_VERSION "0.0.0"
#endif

namespace linresp::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const std::optional<EpsilonRange>& r) {
    if (!r) return nullptr;
    return json{{"lower", r->lower}, {"upper", r->upper}};
}

json to_json(const std::vector<TableRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"n", r.n},
                       {"objective", r.objective},
                       {"epsilon", r.epsilon},
                       {"error", r.error},
                       {"minus", r.minus},
                       {"base", r.base},
                       {"plus", r.plus}});
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_csv(std::ostream& os, const std::vector<std::string>& headers,
               const std::vector<std::vector<std::string>>& rows) {
    for (std::size_t k = 0; k < headers.size(); ++k) os << (k ? "," : "") << csv_field(headers[k]);
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_field(row[k]);
        os << '\n';
    }
}

std::vector<std::vector<std::string>> csv_rows(const std::vector<TableRow>& rows) {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows) {
        out.push_back({std::to_string(r.n), io::format_double(r.objective), io::format_double(r.epsilon),
                       io::format_double(r.error), io::format_double(r.minus), io::format_double(r.base),
                       io::format_double(r.plus)});
    }
    return out;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::InvalidInput, "cannot open " + path + " for writing");
    return os;
}

struct Settings {
    double zero_threshold = kDefaultZeroThreshold;
    double singular_tolerance = 1e-11;
    double eigen_tolerance = 1e-12;
    std::string json_path;
    std::string csv_path;
    std::string plot_dir;
    std::string perturbation_out;

    [[nodiscard]] ExperimentOptions experiment() const {
        ExperimentOptions o;
        o.ulam.zero_threshold = zero_threshold;
        o.norm.singular.tolerance = singular_tolerance;
        o.eigen.tolerance = eigen_tolerance;
        return o;
    }

    [[nodiscard]] json tolerances() const {
        const ExperimentOptions o = experiment();
        return {{"zero_threshold", zero_threshold},
                {"structural_one", kStructuralOneTolerance},
                {"column_sum", kColumnSumTolerance},
                {"stationary_residual", o.stationary.residual_tolerance},
                {"response_residual", ResponseSolver::kResidualTolerance},
                {"singular_residual", o.norm.singular.tolerance},
                {"singular_degeneracy", o.norm.degeneracy_tolerance},
                {"sign_resolution", kSignResolution},
                {"eigen_residual", o.eigen.tolerance},
                {"spectral_gap", o.eigen.gap_tolerance},
                {"quadrature_failure", kQuadratureFailureThreshold}};
    }
};

struct SourceOptions {
    std::string matrix;
    std::string ulam;
    Index n = 2000;
    double noise = 0.1;
    Index quadrature = 32;
};

struct Source {
    std::optional<StochasticMatrix> matrix;
    std::optional<UlamModel> model;
    json description;

    [[nodiscard]] const StochasticMatrix& get() const { return model ? model->matrix : *matrix; }
    [[nodiscard]] double l2_scale() const { return model ? static_cast<double>(model->n) : 1.0; }
};

UlamModel make_model(const std::string& name, Index n, double noise, Index quadrature, const Settings& settings) {
    const auto map = map_by_name(name);
    if (!map) throw Error(ErrorKind::InvalidInput, "unknown map '" + name + "'");
    UlamOptions opts;
    opts.quadrature = quadrature;
    opts.zero_threshold = settings.zero_threshold;
    return build_ulam(*map, NoiseKernel{noise, map->domain}, n, opts);
}

json describe(const UlamModel& model) {
    return {{"kind", "ulam"},
            {"map", model.map.name},
            {"domain", model.map.domain == Domain::Circle ? "circle" : "interval"},
            {"noise_radius", model.noise.epsilon},
            {"n", model.n},
            {"quadrature", model.quadrature},
            {"nnz", model.matrix.matrix().nonZeros()},
            {"max_column_deviation", model.max_column_deviation}};
}

Source load_source(const SourceOptions& src, const Settings& settings) {
    Source out;
    if (!src.matrix.empty() && !src.ulam.empty()) throw Error(ErrorKind::InvalidInput, "give either --matrix or --ulam");
    if (!src.matrix.empty()) {
        out.matrix.emplace(io::read_matrix(fs::path(src.matrix)), settings.zero_threshold);
        out.description = {{"kind", "file"}, {"path", src.matrix}, {"n", out.matrix->n()}};
    } else if (!src.ulam.empty()) {
        out.model.emplace(make_model(src.ulam, src.n, src.noise, src.quadrature, settings));
        out.description = describe(*out.model);
    } else {
        throw Error(ErrorKind::InvalidInput, "a matrix source is required (--matrix or --ulam)");
    }
    return out;
}

void add_source(CLI::App* cmd, SourceOptions& src) {
    cmd->add_option("--matrix", src.matrix, "Transition matrix in coordinate format");
    cmd->add_option("--ulam", src.ulam, "Built-in map: lanford, logistic, double-lanford, double-lanford-literal");
    cmd->add_option("--n", src.n, "Ulam partition size")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", src.noise, "Noise radius of the Ulam model")->check(CLI::PositiveNumber);
    cmd->add_option("--quadrature", src.quadrature, "Midpoint sub-samples per Ulam cell")->check(CLI::PositiveNumber);
}

void add_outputs(CLI::App* cmd, Settings& s, bool plots) {
    cmd->add_option("--json", s.json_path, "Write the JSON result here instead of stdout");
    cmd->add_option("--csv", s.csv_path, "Write the table rows as CSV");
    if (plots) {
        cmd->add_option("--plot-dir", s.plot_dir, "Directory for h, u1 and m* plot data");
        cmd->add_option("--perturbation-out", s.perturbation_out, "Write m* in coordinate format");
    }
}

Vector load_observable(const std::string& spec, Index n) {
    if (spec == "two-sin-pi-x") return discretize_observable(two_sin_pi, n).c;
    Vector c = io::read_vector(fs::path(spec));
    if (c.size() != n) throw Error(ErrorKind::DimensionMismatch, "observable length differs from matrix");
    return c;
}

void write_plot_vector(const fs::path& path, const Vector& v, const Source& src) {
    std::ofstream os = open_output(path.string());
    const Index n = v.size();
    for (Index i = 0; i < n; ++i) {
        if (src.model) {
            os << io::format_double((static_cast<double>(i) + 0.5) / static_cast<double>(n)) << ' '
               << io::format_double(static_cast<double>(n) * v[i]) << '\n';
        } else {
            os << i + 1 << ' ' << io::format_double(v[i]) << '\n';
        }
    }
}

void write_artifacts(const Settings& s, const Source& src, const Vector& h, const Vector* u1, const Perturbation& m) {
    if (!s.perturbation_out.empty()) io::write_matrix(fs::path(s.perturbation_out), m.values());
    if (s.plot_dir.empty()) return;
    const fs::path dir(s.plot_dir);
    fs::create_directories(dir);
    write_plot_vector(dir / "h.dat", h, src);
    if (u1) write_plot_vector(dir / "u1.dat", *u1, src);
    io::write_matrix(dir / "m_star.dat", m.values());
}

json envelope(const std::string& command, const Settings& s) {
    return {{"command", command},
            {"version", version()},
            {"threads", thread_count()},
            {"tolerances", s.tolerances()}};
}

void emit(std::ostream& out, const Settings& s, const json& result) {
    if (s.json_path.empty()) {
        out << result.dump(2) << '\n';
    } else {
        std::ofstream os = open_output(s.json_path);
        os << result.dump(2) << '\n';
    }
}

void emit_table(const Settings& s, const std::array<std::string, 7>& headers, const std::vector<TableRow>& rows) {
    if (s.csv_path.empty()) return;
    std::ofstream os = open_output(s.csv_path);
    write_csv(os, std::vector<std::string>(headers.begin(), headers.end()), csv_rows(rows));
}

void emit_objective_csv(const Settings& s, const std::array<std::string, 7>& headers, const std::vector<TableRow>& rows,
                        Index n, double objective) {
    if (s.csv_path.empty()) return;
    std::ofstream os = open_output(s.csv_path);
    if (!rows.empty()) {
        write_csv(os, std::vector<std::string>(headers.begin(), headers.end()), csv_rows(rows));
    } else {
        write_csv(os, std::vector<std::string>(headers.begin(), headers.begin() + 2),
                  {{std::to_string(n), io::format_double(objective)}});
    }
}

json error_record(const std::string& kind, const std::string& cat, const std::string& message, int code) {
    return {{"error", {{"kind", kind}, {"category", cat}, {"message", message}, {"exit_code", code}}}};
}

std::vector<StochasticMatrix> load_sequence(const std::vector<std::string>& paths, const Settings& s) {
    std::vector<StochasticMatrix> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.emplace_back(io::read_matrix(fs::path(p)), s.zero_threshold);
    return out;
}

MatrixSequence make_sequence(const std::vector<std::string>& paths, const std::string& h0_path, const Settings& s) {
    auto matrices = load_sequence(paths, s);
    if (matrices.empty()) throw Error(ErrorKind::InvalidInput, "--matrices needs at least one file");
    Vector h0;
    if (!h0_path.empty()) {
        h0 = io::read_vector(fs::path(h0_path));
    } else {
        for (const auto& m : matrices) {
            if (m.n() != matrices.front().n() || (m.matrix() - matrices.front().matrix()).norm() != 0.0) {
                throw Error(ErrorKind::InvalidInput, "--h0 is required unless every matrix in the sequence is the same");
            }
        }
        h0 = stationary_distribution(matrices.front());
    }
    return MatrixSequence(std::move(matrices), std::move(h0));
}

json sequence_json(const SequentialOptimum& opt) {
    json flips = json::array();
    for (bool f : opt.flipped) flips.push_back(f);
    json norms = json::array();
    json ranges = json::array();
    for (const auto& p : opt.perturbations.perturbations) {
        norms.push_back(p.frobenius_norm());
        ranges.push_back(to_json(p.epsilon_range));
    }
    return {{"objective", opt.objective},
            {"pre_flip_objective", opt.pre_flip_objective},
            {"joint_norm", opt.perturbations.joint_norm()},
            {"step_norms", norms},
            {"epsilon_ranges", ranges},
            {"flipped", flips},
            {"u_terminal", to_json(opt.u_terminal)},
            {"notes", opt.notes}};
}

void write_sequence(const Settings& s, const SequentialOptimum& opt) {
    if (s.perturbation_out.empty()) return;
    for (std::size_t t = 0; t < opt.perturbations.perturbations.size(); ++t) {
        io::write_matrix(fs::path(s.perturbation_out + "_" + std::to_string(t) + ".txt"),
                         opt.perturbations.perturbations[t].values());
    }
}

}  // namespace

std::string version() { return LINRESP_VERSION; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear response and optimal perturbations of Markov chains", "linresp"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    Settings settings;
    app.add_option("--zero-threshold", settings.zero_threshold, "Entries at or below this are structural zeros")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--singular-tol", settings.singular_tolerance, "Residual tolerance of the singular solver")
        ->check(CLI::PositiveNumber);
    app.add_option("--eigen-tol", settings.eigen_tolerance, "Residual tolerance of the eigen solver")
        ->check(CLI::PositiveNumber);

    std::function<void()> action;

    // response
    auto* response = app.add_subcommand("response", "Linear response u1 = Q m h of a given perturbation");
    std::string resp_matrix, resp_pert, resp_h;
    response->add_option("--matrix", resp_matrix, "Transition matrix")->required();
    response->add_option("--perturbation", resp_pert, "Perturbation matrix")->required();
    response->add_option("--stationary", resp_h, "Stationary vector (computed when omitted)");
    response->add_option("--json", settings.json_path, "Write the JSON result here instead of stdout");
    response->add_option("--output", settings.perturbation_out, "Write u1 as a vector file");
    response->callback([&] {
        action = [&] {
            const StochasticMatrix m(io::read_matrix(fs::path(resp_matrix)), settings.zero_threshold);
            const Perturbation p(io::read_matrix(fs::path(resp_pert)), m.support_ptr());
            const Vector h = resp_h.empty() ? stationary_distribution(m) : io::read_vector(fs::path(resp_h));
            const ResponseSolver solver(m, h);
            const Vector u1 = solver.response(p);
            if (!settings.perturbation_out.empty()) io::write_vector(fs::path(settings.perturbation_out), u1);
            json result = envelope("response", settings);
            result["input"] = {{"matrix", resp_matrix}, {"perturbation", resp_pert}, {"n", m.n()}};
            result["result"] = {{"objective", u1.squaredNorm()},
                                {"residual", solver.augmented_residual(u1, p.values() * h)},
                                {"sum_u1", u1.sum()},
                                {"epsilon_range", to_json(std::optional(feasible_epsilon_range(m, p)))},
                                {"h", to_json(h)},
                                {"u1", to_json(u1)}};
            emit(out, settings, result);
        };
    });

    // optimize-norm
    auto* onorm = app.add_subcommand("optimize-norm", "Perturbation maximizing the norm of the response");
    SourceOptions norm_src;
    std::vector<double> norm_probes;
    std::optional<double> norm_sign_probe;
    std::string norm_algorithm = "auto";
    add_source(onorm, norm_src);
    add_outputs(onorm, settings, true);
    onorm->add_option("--probe", norm_probes, "Perturbation sizes for the linearization table")->delimiter(',');
    onorm->add_option("--sign-probe", norm_sign_probe, "Perturbation size used to choose the sign of m*");
    onorm->add_option("--algorithm", norm_algorithm, "auto, positive or general")
        ->check(CLI::IsMember({"auto", "positive", "general"}));
    onorm->callback([&] {
        action = [&] {
            const Source src = load_source(norm_src, settings);
            const StochasticMatrix& m = src.get();
            ExperimentOptions eo = settings.experiment();
            eo.norm.probe_epsilon = norm_sign_probe;
            eo.norm_algorithm = norm_algorithm == "positive"  ? NormAlgorithm::Positive
                                : norm_algorithm == "general" ? NormAlgorithm::General
                                                              : NormAlgorithm::Auto;
            const NormExperiment ex = run_norm_experiment(m, src.l2_scale(), norm_probes, eo);
            const bool positive = eo.norm_algorithm == NormAlgorithm::Positive ||
                                  (eo.norm_algorithm == NormAlgorithm::Auto && m.is_positive() &&
                                   m.n() <= eo.norm.dense_limit);
            const auto& opt = ex.optimum;
            json result = envelope("optimize-norm", settings);
            result["input"] = src.description;
            result["result"] = {{"algorithm", positive ? "positive" : "general"},
                                {"objective", opt.objective},
                                {"objective_l2", src.l2_scale() * opt.u1.squaredNorm()},
                                {"response_norm_squared", opt.u1.squaredNorm()},
                                {"leading_singular_values", opt.leading_singular_values},
                                {"unique", opt.unique},
                                {"sign_probe_epsilon", opt.sign_probe_epsilon},
                                {"sign_flipped", opt.sign_flipped},
                                {"epsilon_range", to_json(opt.m_star.epsilon_range)},
                                {"m_star_frobenius", opt.m_star.frobenius_norm()},
                                {"notes", opt.notes},
                                {"rows", to_json(ex.rows)},
                                {"h", to_json(opt.h)},
                                {"u1", to_json(opt.u1)}};
            write_artifacts(settings, src, opt.h, &opt.u1, opt.m_star);
            emit_objective_csv(settings, table_spec(1).headers, ex.rows, m.n(), src.l2_scale() * opt.u1.squaredNorm());
            emit(out, settings, result);
        };
    });

    // optimize-expectation
    auto* oexp = app.add_subcommand("optimize-expectation", "Perturbation maximizing the response of <c, h>");
    SourceOptions exp_src;
    std::vector<double> exp_probes;
    std::string exp_observable;
    add_source(oexp, exp_src);
    add_outputs(oexp, settings, true);
    oexp->add_option("--observable", exp_observable, "Vector file or two-sin-pi-x")->required();
    oexp->add_option("--probe", exp_probes, "Perturbation sizes for the linearization table")->delimiter(',');
    oexp->callback([&] {
        action = [&] {
            const Source src = load_source(exp_src, settings);
            const StochasticMatrix& m = src.get();
            const Vector c = load_observable(exp_observable, m.n());
            const ExpectationExperiment ex = run_expectation_experiment(m, c, exp_probes, settings.experiment());
            const auto& opt = ex.optimum;
            json result = envelope("optimize-expectation", settings);
            result["input"] = src.description;
            result["input"]["observable"] = exp_observable;
            result["result"] = {{"objective", opt.objective},
                                {"nu", opt.nu},
                                {"epsilon_range", to_json(opt.m_star.epsilon_range)},
                                {"m_star_frobenius", opt.m_star.frobenius_norm()},
                                {"rows", to_json(ex.rows)},
                                {"w", to_json(opt.w)},
                                {"h", to_json(opt.h)},
                                {"u1", to_json(opt.u1)}};
            write_artifacts(settings, src, opt.h, &opt.u1, opt.m_star);
            emit_objective_csv(settings, table_spec(2).headers, ex.rows, m.n(), opt.objective);
            emit(out, settings, result);
        };
    });

    // optimize-mixing
    auto* omix = app.add_subcommand("optimize-mixing", "Perturbation shrinking |lambda2| fastest");
    SourceOptions mix_src;
    std::vector<double> mix_probes;
    add_source(omix, mix_src);
    add_outputs(omix, settings, true);
    omix->add_option("--probe", mix_probes, "Perturbation sizes for the eigenvalue table")->delimiter(',');
    omix->callback([&] {
        action = [&] {
            const Source src = load_source(mix_src, settings);
            const StochasticMatrix& m = src.get();
            const MixingExperiment ex = run_mixing_experiment(m, mix_probes, settings.experiment());
            const auto& opt = ex.optimum;
            json result = envelope("optimize-mixing", settings);
            result["input"] = src.description;
            result["result"] = {{"rho", opt.rho},
                                {"nu", opt.nu},
                                {"lambda2", {{"re", opt.pair.lambda2.real()}, {"im", opt.pair.lambda2.imag()}}},
                                {"lambda2_modulus", std::abs(opt.pair.lambda2)},
                                {"lambda3_modulus", opt.pair.lambda3_modulus},
                                {"gap_ok", opt.pair.gap_ok},
                                {"epsilon_range", to_json(opt.m_star.epsilon_range)},
                                {"m_star_frobenius", opt.m_star.frobenius_norm()},
                                {"notes", opt.notes},
                                {"rows", to_json(ex.rows)}};
            write_artifacts(settings, src, stationary_distribution(m), nullptr, opt.m_star);
            emit_objective_csv(settings, table_spec(5).headers, ex.rows, m.n(), opt.rho);
            emit(out, settings, result);
        };
    });

    // sequential-norm / sequential-expectation
    std::vector<std::string> seq_paths;
    std::string seq_h0, seq_observable;
    auto* snorm = app.add_subcommand("sequential-norm", "Perturbation sequence maximizing ||u(tau)||");
    snorm->add_option("--matrices", seq_paths, "Matrix files M(0) ... M(tau-1)")->required();
    snorm->add_option("--h0", seq_h0, "Initial probability vector");
    snorm->add_option("--json", settings.json_path, "Write the JSON result here instead of stdout");
    snorm->add_option("--perturbation-out", settings.perturbation_out, "Prefix for the m(t) files");
    snorm->callback([&] {
        action = [&] {
            const MatrixSequence seq = make_sequence(seq_paths, seq_h0, settings);
            SequentialOptions so;
            so.singular.tolerance = settings.singular_tolerance;
            const SequentialOptimum opt = optimize_sequential_norm(seq, so);
            json result = envelope("sequential-norm", settings);
            result["input"] = {{"matrices", seq_paths}, {"h0", seq_h0.empty() ? "stationary" : seq_h0}, {"tau", seq.tau()}};
            result["result"] = sequence_json(opt);
            result["result"]["leading_singular_values"] = opt.leading_singular_values;
            result["result"]["unique"] = opt.unique;
            write_sequence(settings, opt);
            emit(out, settings, result);
        };
    });
    auto* sexp = app.add_subcommand("sequential-expectation", "Perturbation sequence maximizing c^T u(tau)");
    sexp->add_option("--matrices", seq_paths, "Matrix files M(0) ... M(tau-1)")->required();
    sexp->add_option("--h0", seq_h0, "Initial probability vector");
    sexp->add_option("--observable", seq_observable, "Vector file or two-sin-pi-x")->required();
    sexp->add_option("--json", settings.json_path, "Write the JSON result here instead of stdout");
    sexp->add_option("--perturbation-out", settings.perturbation_out, "Prefix for the m(t) files");
    sexp->callback([&] {
        action = [&] {
            const MatrixSequence seq = make_sequence(seq_paths, seq_h0, settings);
            const Vector c = load_observable(seq_observable, seq.n());
            const SequentialOptimum opt = optimize_sequential_expectation(seq, c);
            json result = envelope("sequential-expectation", settings);
            result["input"] = {{"matrices", seq_paths},
                               {"h0", seq_h0.empty() ? "stationary" : seq_h0},
                               {"tau", seq.tau()},
                               {"observable", seq_observable}};
            result["result"] = sequence_json(opt);
            result["result"]["nu"] = opt.nu;
            write_sequence(settings, opt);
            emit(out, settings, result);
        };
    });

    // ulam-build
    auto* ubuild = app.add_subcommand("ulam-build", "Ulam matrix of a noisy one-dimensional map");
    std::string ub_map = "lanford", ub_output;
    Index ub_n = 2000, ub_k = 32;
    double ub_noise = 0.1;
    ubuild->add_option("--map", ub_map, "lanford, logistic, double-lanford or double-lanford-literal");
    ubuild->add_option("--n", ub_n, "Partition size")->check(CLI::PositiveNumber);
    ubuild->add_option("--eps", ub_noise, "Noise radius")->check(CLI::PositiveNumber);
    ubuild->add_option("--quadrature", ub_k, "Midpoint sub-samples per cell")->check(CLI::PositiveNumber);
    ubuild->add_option("--output", ub_output, "Matrix file (coordinate format)")->required();
    ubuild->add_option("--json", settings.json_path, "Write the JSON result here instead of stdout");
    ubuild->callback([&] {
        action = [&] {
            const UlamModel model = make_model(ub_map, ub_n, ub_noise, ub_k, settings);
            io::write_matrix(fs::path(ub_output), model.matrix.matrix());
            json result = envelope("ulam-build", settings);
            result["result"] = describe(model);
            result["result"]["mixing"] = model.matrix.is_mixing();
            result["result"]["output"] = ub_output;
            emit(out, settings, result);
        };
    });

    // contour-2x2
    auto* contour = app.add_subcommand("contour-2x2", "Log norm objective of 2x2 chains on a grid");
    Index resolution = 100;
    contour->add_option("--resolution", resolution, "Grid points per axis")->check(CLI::Range(2, 100000));
    contour->add_option("--json", settings.json_path, "Write the JSON result here instead of stdout");
    contour->add_option("--csv", settings.csv_path, "Write the grid as CSV");
    contour->callback([&] {
        action = [&] {
            const auto grid = contour_2x2(resolution);
            json points = json::array();
            std::vector<std::vector<std::string>> rows;
            for (const auto& p : grid) {
                points.push_back({p[0], p[1], p[2]});
                rows.push_back({io::format_double(p[0]), io::format_double(p[1]), io::format_double(p[2])});
            }
            if (!settings.csv_path.empty()) {
                std::ofstream os = open_output(settings.csv_path);
                write_csv(os, {"M12", "M21", "log((M12^2+M21^2)/(M12+M21)^4)"}, rows);
            }
            json result = envelope("contour-2x2", settings);
            result["result"] = {{"resolution", resolution}, {"points", points}};
            emit(out, settings, result);
        };
    });

    // reproduce
    auto* repro = app.add_subcommand("reproduce", "Recompute one of the published tables");
    int table = 1;
    std::vector<Index> repro_sizes;
    repro->add_option("--table", table, "Table number 1..5")->required()->check(CLI::Range(1, 5));
    repro->add_option("--n", repro_sizes, "Partition sizes (default: those of the table)")->delimiter(',');
    add_outputs(repro, settings, false);
    repro->callback([&] {
        action = [&] {
            const TableSpec spec = table_spec(table);
            const auto rows = reproduce_table(table, repro_sizes, settings.experiment());
            json result = envelope("reproduce", settings);
            json sizes = json::array();
            for (Index n : repro_sizes.empty() ? spec.sizes : repro_sizes) sizes.push_back(n);
            result["input"] = {{"table", table},
                               {"title", spec.title},
                               {"map", spec.map.name},
                               {"noise_radius", spec.noise},
                               {"sizes", sizes},
                               {"epsilons", spec.epsilons}};
            result["result"] = {{"columns", spec.headers}, {"rows", to_json(rows)}};
            emit_table(settings, spec.headers, rows);
            emit(out, settings, result);
        };
    });

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::CallForVersion& e) {
            return app.exit(e, out, err);
        } catch (const CLI::ParseError& e) {
            err << error_record("InvalidInput", "validation", e.what(), kExitValidation).dump() << '\n';
            return kExitValidation;
        }
        if (action) action();
        return kExitSuccess;
    } catch (const Error& e) {
        const bool numerical = category(e.kind()) == ErrorCategory::Numerical;
        const int code = numerical ? kExitNumerical : kExitValidation;
        err << error_record(std::string(to_string(e.kind())), numerical ? "numerical" : "validation", e.what(), code)
                   .dump()
            << '\n';
        return code;
    } catch (const std::exception& e) {
        err << error_record("InternalError", "numerical", e.what(), kExitNumerical).dump() << '\n';
        return kExitNumerical;
    }
}

}  // namespace linresp::cli
