#include "schatten_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "schatten/branches.hpp"
#include "schatten/derivatives.hpp"
#include "schatten/embedding.hpp"
#include "schatten/errors.hpp"
#include "schatten/matrix_io.hpp"
#include "schatten/moi.hpp"
#include "schatten/spectral.hpp"

namespace schatten::cli {

namespace fs = std::filesystem;

namespace {

// Thrown for argument problems found after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_extended(const std::string& text, const char* what) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "infinity") return kInfinity;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw UsageError("");
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string(what) + ": not a number: " + text);
    }
}

fs::path out_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? fs::path(env) : fs::path();
}

// Empty result means standard output.
fs::path resolve_out(const std::string& flag, const std::string& default_name) {
    const fs::path dir = out_dir();
    if (!flag.empty()) {
        if (flag == "-") return {};
        const fs::path p(flag);
        return (p.is_relative() && !dir.empty()) ? dir / p : p;
    }
    return dir.empty() ? fs::path() : dir / default_name;
}

class Output {
public:
    Output(const fs::path& path, std::ostream& fallback) : path_(path), stream_(&fallback) {
        if (path.empty()) return;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw UsageError("cannot write " + path.string());
        stream_ = file_.get();
    }
    std::ostream& stream() { return *stream_; }

private:
    fs::path path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

ComplexMatrix load(const std::string& path) { return read_matrix_file(path); }

std::string real(double x) { return format_real(x); }

ScalarSymbol symbol_by_name(const std::string& name, int degree, double p, double eps) {
    if (name == "power") return ScalarSymbol::power(degree);
    if (name == "exp") return ScalarSymbol::exponential();
    if (name == "abs-power") return ScalarSymbol::abs_power(p, eps);
    throw UsageError("unknown symbol " + name + " (power, exp, abs-power)");
}

RealFunction probe_family(const std::string& name, double s, double q, double p, double r) {
    if (name == "abs") return [](double t) { return std::abs(t); };
    if (name == "t-abs-t") return [](double t) { return t * std::abs(t); };
    if (name == "abs-power") return [s](double t) { return std::pow(std::abs(t), s); };
    if (name == "iqp") return [q, p](double t) { return iqp_rhs(t, q, p); };
    if (name == "iqp-gap") return [q, p, r](double t) { return iqp_rhs(t, q, p) - std::pow(std::abs(t), r); };
    throw UsageError("unknown function family " + name + " (abs, t-abs-t, abs-power, iqp, iqp-gap)");
}

struct Common {
    std::string a_path;
    std::string b_path;
    std::string out;
};

int cmd_norm(const std::string& matrix, const std::string& p_text, std::ostream& out) {
    const double p = parse_extended(p_text, "--p");
    out << real(schatten_norm(load(matrix), p)) << '\n';
    return kOk;
}

struct DeriveArgs {
    Common io;
    int order = 1;
    std::string kind = "trace";
    std::string symbol = "power";
    int degree = 3;
    double p = 0.5;
    double eps = 0.0;
    double h = 0.0;
};

int cmd_derive(const DeriveArgs& args, std::ostream& out) {
    const ComplexMatrix a = load(args.io.a_path);
    const ComplexMatrix b = load(args.io.b_path);
    const DerivativeTolerances tol;
    const double h = args.h > 0.0 ? args.h : (args.order == 1 ? tol.h1 : tol.h2);
    double closed = 0.0;
    RealFunction g;
    if (args.kind == "trace") {
        const ScalarSymbol f = symbol_by_name(args.symbol, args.degree, args.p, args.eps);
        closed = trace_derivative(f, a, b, args.order);
        g = [&, f](double t) {
            double s = 0.0;
            for (double v : hermitian_eigenvalues(a + t * b)) s += f(v);
            return s;
        };
    } else if (args.kind == "schatten") {
        closed = args.order == 1 ? schatten_first_derivative(a, b, args.p)
                 : args.eps > 0.0 ? schatten_second_derivative(a, b, args.p, args.eps)
                                  : schatten_second_derivative(a, b, args.p);
        g = [&](double t) { return schatten_norm_pow(a + t * b, args.p); };
    } else {
        throw UsageError("--kind must be trace or schatten");
    }
    const auto report = DerivativeReport::compare(args.order, closed, finite_difference(g, 0.0, args.order, h));
    Output sink(resolve_out(args.io.out, "derive.csv"), out);
    sink.stream() << "order,closed_form,finite_difference,abs_err,rel_err\n"
                  << report.order << ',' << real(report.closed_form) << ',' << real(report.finite_difference) << ','
                  << real(report.abs_err) << ',' << real(report.rel_err) << '\n';
    return kOk;
}

struct MoiArgs {
    std::vector<std::string> operators;
    std::vector<std::string> perturbations;
    std::string symbol = "power";
    int degree = 2;
    double p = 0.5;
    double eps = 0.0;
    double group_tol = kDefaultGroupTol;
    std::string out;
};

int cmd_moi(const MoiArgs& args, std::ostream& out) {
    std::vector<ComplexMatrix> bs;
    for (const auto& path : args.perturbations) bs.push_back(load(path));
    std::vector<ComplexMatrix> as;
    for (const auto& path : args.operators) as.push_back(load(path));
    if (as.size() == 1) as.assign(bs.size() + 1, as.front());
    const ScalarSymbol f = symbol_by_name(args.symbol, args.degree, args.p, args.eps);
    const auto phi = MultiSymbol::divided_difference(f, bs.size(), args.group_tol);
    const ComplexMatrix result = moi_apply(phi, as, bs, args.group_tol);
    Output sink(resolve_out(args.out, "moi.json"), out);
    sink.stream() << matrix_to_json(result) << '\n';
    return kOk;
}

struct BranchArgs {
    Common io;
    double center = 0.0;
    double half_width = 0.05;
    std::size_t points = 41;
};

int cmd_branches(const BranchArgs& args, std::ostream& out) {
    const auto family =
        track_branches(load(args.io.a_path), load(args.io.b_path), args.center, args.half_width, args.points);
    Output sink(resolve_out(args.io.out, "branches.csv"), out);
    write_branches_csv(sink.stream(), family);
    return kOk;
}

struct MultiplicityArgs {
    BranchArgs branch;
    std::optional<std::size_t> index;
    std::string q_text;
    double p = 0.0;
    BranchTolerances tol;
};

int cmd_multiplicity(const MultiplicityArgs& args, std::ostream& out) {
    const auto family = track_branches(load(args.branch.io.a_path), load(args.branch.io.b_path),
                                       args.branch.center, args.branch.half_width, args.branch.points);
    std::vector<MultiplicityEstimate> estimates;
    if (args.index)
        estimates.push_back(estimate_zero_multiplicity(family, *args.index, args.tol));
    else
        estimates = estimate_all(family, args.tol);

    Output sink(resolve_out(args.branch.io.out, "multiplicity.csv"), out);
    auto& os = sink.stream();
    os << "branch,m,mu0,slope,fit_residual,confidence\n";
    for (const auto& e : estimates)
        os << e.branch_index << ',' << e.m << ',' << real(e.mu0) << ',' << real(e.slope) << ','
           << real(e.fit_residual) << ',' << real(e.confidence) << '\n';
    if (!args.q_text.empty()) {
        const double q = parse_extended(args.q_text, "--q");
        const auto report = series_condition_check(family, estimates, q, args.p);
        os << "# condition,satisfied,residual,detail\n";
        for (const auto& c : report.conditions)
            os << "# " << c.id << ',' << (c.satisfied ? "true" : "false") << ',' << real(c.residual) << ','
               << c.detail << '\n';
        os << "# sign_obstruction," << (report.sign_obstruction ? "true" : "false") << '\n';
    }
    return kOk;
}

struct IqpArgs {
    Common io;
    std::string q_text;
    double p = 0.5;
    std::vector<double> ts;
};

int cmd_verify_iqp(const IqpArgs& args, std::ostream& out, std::ostream& err) {
    EmbeddingInstance inst{parse_extended(args.q_text, "--q"), args.p, load(args.io.a_path), load(args.io.b_path),
                           args.ts};
    for (const auto& v : inst.violations()) err << "warning: " << v << '\n';
    const auto report = iqp_residual(inst);
    Output sink(resolve_out(args.io.out, "verify_iqp.csv"), out);
    auto& os = sink.stream();
    os << "# max_residual=" << real(report.max_residual) << ",residual_at=" << real(report.residual_at) << '\n';
    os << "t,lhs,rhs,residual\n";
    for (const auto& s : report.per_t)
        os << real(s.t) << ',' << real(s.lhs) << ',' << real(s.rhs) << ',' << real(s.residual) << '\n';
    return kOk;
}

struct FalsifyArgs {
    std::string q_text;
    double p = 0.0;
    std::size_t n = 2;
    SearchConfig config;
    bool no_witness = false;
    bool complex_mode = false;
    std::string out;
    std::string csv;
};

int cmd_falsify(const FalsifyArgs& args, bool commutative, std::ostream& out) {
    const double q = parse_extended(args.q_text, "--q");
    SearchConfig config = args.config;
    config.seed_disjoint_witness = !args.no_witness;
    const SearchReport report =
        commutative ? falsify_commutative(q, args.p, args.n, config, args.complex_mode) : falsify(q, args.p, args.n, config);

    const std::string stem = commutative ? "falsify_commutative" : "falsify";
    const fs::path json_path = resolve_out(args.out, stem + ".json");
    {
        Output sink(json_path, out);
        write_run_report(sink.stream(), report);
    }
    if (!args.csv.empty()) {
        Output sink(resolve_out(args.csv, stem + ".csv"), out);
        write_sweep_csv_header(sink.stream());
        write_sweep_csv_row(sink.stream(), report);
    }
    if (!json_path.empty()) out << "floor=" << real(report.floor()) << '\n';
    return report.budget_exhausted ? kBudgetExhausted : kOk;
}

struct ProbeArgs {
    std::string family = "abs";
    double t0 = 0.0;
    double s = 0.5;
    std::string q_text = "2";
    double p = 0.5;
    double r = 0.25;
    double tol = DerivativeTolerances{}.probe_tol;
};

int cmd_probe(const ProbeArgs& args, std::ostream& out) {
    const auto g = probe_family(args.family, args.s, parse_extended(args.q_text, "--q"), args.p, args.r);
    out << differentiability_probe(g, args.t0, args.tol) << '\n';
    return kOk;
}

// Merges sweep CSVs with identical headers; rows sorted by (q, p, n, seed).
int cmd_report(const std::vector<std::string>& inputs, const std::string& out_flag, std::ostream& out) {
    std::string header;
    struct Row {
        std::vector<double> key;
        std::string text;
    };
    std::vector<Row> rows;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open " + path);
        std::string line;
        if (!std::getline(in, line)) continue;
        if (header.empty())
            header = line;
        else if (line != header)
            throw UsageError("header mismatch in " + path);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            Row row{{}, line};
            std::stringstream ss(line);
            std::string cell;
            for (int k = 0; k < 4 && std::getline(ss, cell, ','); ++k) row.key.push_back(parse_extended(cell, path.c_str()));
            rows.push_back(std::move(row));
        }
    }
    if (header.empty()) throw UsageError("no input rows");
    std::stable_sort(rows.begin(), rows.end(), [](const Row& l, const Row& r) { return l.key < r.key; });
    Output sink(resolve_out(out_flag, "report.csv"), out);
    sink.stream() << header << '\n';
    for (const auto& r : rows) sink.stream() << r.text << '\n';
    return kOk;
}

void add_io(CLI::App* sub, Common& io, bool need_b = true) {
    sub->add_option("--a", io.a_path, "operator A (matrix file)")->required()->check(CLI::ExistingFile);
    if (need_b) sub->add_option("--b", io.b_path, "perturbation B (matrix file)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", io.out, "output path ('-' for stdout)");
}

void add_grid(CLI::App* sub, BranchArgs& g) {
    sub->add_option("--center", g.center, "center t_c");
    sub->add_option("--half-width", g.half_width, "half width of the t grid")->check(CLI::PositiveNumber);
    sub->add_option("--points", g.points, "odd number of grid points (>= 11)");
}

void add_search(CLI::App* sub, FalsifyArgs& f) {
    sub->add_option("--q", f.q_text, "target exponent q (number or inf)")->required();
    sub->add_option("--p", f.p, "Schatten exponent 0 < p < 1")->required();
    sub->add_option("--n", f.n, "dimension");
    sub->add_option("--restarts", f.config.restarts, "number of restarts");
    sub->add_option("--max-evals", f.config.max_evals, "evaluations per restart");
    sub->add_option("--seed", f.config.seed, "master seed");
    sub->add_option("--threads", f.config.threads, "worker threads (0 = all cores)");
    sub->add_option("--t", f.config.t_samples, "t samples (default: built-in grid)");
    sub->add_option("--x-tol", f.config.optimizer.x_tol, "simplex collapse tolerance");
    sub->add_option("--f-tol", f.config.optimizer.f_tol_abs, "simplex value tolerance");
    sub->add_flag("--no-witness-seed", f.no_witness, "start every restart from a random point");
    sub->add_option("--out", f.out, "JSON run report path ('-' for stdout)");
    sub->add_option("--csv", f.csv, "sweep CSV path (q,p,n,seed,floor)");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Schatten quasi-norm perturbation toolkit", "schatten"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string norm_matrix, norm_p;
    auto* norm = app.add_subcommand("norm", "Schatten p-(quasi-)norm of a matrix");
    norm->add_option("--matrix", norm_matrix)->required()->check(CLI::ExistingFile);
    norm->add_option("--p", norm_p, "exponent (number or inf)")->required();

    DeriveArgs derive_args;
    auto* derive = app.add_subcommand("derive", "closed-form derivative against finite differences at t = 0");
    add_io(derive, derive_args.io);
    derive->add_option("--order", derive_args.order)->check(CLI::IsMember({1, 2}));
    derive->add_option("--kind", derive_args.kind, "trace (Tr f(A+tB)) or schatten (||A+tB||_p^p)");
    derive->add_option("--symbol", derive_args.symbol, "power, exp or abs-power");
    derive->add_option("--degree", derive_args.degree, "degree for the power symbol");
    derive->add_option("--p", derive_args.p, "exponent for abs-power and schatten");
    derive->add_option("--eps", derive_args.eps, "domain cutoff for abs-power");
    derive->add_option("--step", derive_args.h, "finite-difference step (default 1e-4 / 1e-3)");

    MoiArgs moi_args;
    auto* moi = app.add_subcommand("moi", "discrete multiple operator integral with a divided-difference symbol");
    moi->add_option("--a", moi_args.operators, "operator(s): one file or one per slot")->required()->check(CLI::ExistingFile);
    moi->add_option("--b", moi_args.perturbations, "perturbations, one per slot")->check(CLI::ExistingFile);
    moi->add_option("--symbol", moi_args.symbol, "power, exp or abs-power");
    moi->add_option("--degree", moi_args.degree, "degree for the power symbol");
    moi->add_option("--p", moi_args.p, "exponent for abs-power");
    moi->add_option("--eps", moi_args.eps, "domain cutoff for abs-power");
    moi->add_option("--group-tol", moi_args.group_tol, "eigenvalue grouping tolerance");
    moi->add_option("--out", moi_args.out, "output matrix file ('-' for stdout)");

    BranchArgs branch_args;
    auto* branches = app.add_subcommand("branches", "track eigenvalue branches of A + tB");
    add_io(branches, branch_args.io);
    add_grid(branches, branch_args);

    MultiplicityArgs mult_args;
    std::size_t mult_index = 0;
    auto* multiplicity = app.add_subcommand("multiplicity", "order of vanishing of eigenvalue branches");
    add_io(multiplicity, mult_args.branch.io);
    add_grid(multiplicity, mult_args.branch);
    auto* index_opt = multiplicity->add_option("--branch", mult_index, "single branch index");
    multiplicity->add_option("--q", mult_args.q_text, "also run the series conditions for this q");
    multiplicity->add_option("--p", mult_args.p, "exponent for the series conditions");
    multiplicity->add_option("--zero-tol", mult_args.tol.zero_tol);
    multiplicity->add_option("--mu-floor", mult_args.tol.mu_floor);

    IqpArgs iqp_args;
    auto* verify = app.add_subcommand("verify-iqp", "residual of ||A+tB||_p^p = (1+|t|^q)^{p/q}");
    add_io(verify, iqp_args.io);
    verify->add_option("--q", iqp_args.q_text)->required();
    verify->add_option("--p", iqp_args.p)->required();
    verify->add_option("--t", iqp_args.ts, "t samples (default: built-in grid)");

    FalsifyArgs falsify_args;
    auto* falsify_cmd = app.add_subcommand("falsify", "multi-start search for a matrix witness");
    add_search(falsify_cmd, falsify_args);

    FalsifyArgs comm_args;
    auto* comm_cmd = app.add_subcommand("falsify-commutative", "multi-start search for a vector witness");
    add_search(comm_cmd, comm_args);
    comm_cmd->add_flag("--complex", comm_args.complex_mode, "complex coordinates");

    ProbeArgs probe_args;
    auto* probe = app.add_subcommand("probe", "differentiability class of a named function at t0");
    probe->add_option("--function", probe_args.family, "abs, t-abs-t, abs-power, iqp, iqp-gap")->required();
    probe->add_option("--t0", probe_args.t0);
    probe->add_option("--s", probe_args.s, "exponent for abs-power");
    probe->add_option("--q", probe_args.q_text, "q for iqp families");
    probe->add_option("--p", probe_args.p, "p for iqp families");
    probe->add_option("--r", probe_args.r, "subtracted exponent for iqp-gap");
    probe->add_option("--tol", probe_args.tol, "settling tolerance");

    std::vector<std::string> report_inputs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "merge sweep CSVs");
    report->add_option("inputs", report_inputs)->required()->check(CLI::ExistingFile);
    report->add_option("--out", report_out);

    std::vector<std::string> argv_store{"schatten"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*norm) return cmd_norm(norm_matrix, norm_p, out);
        if (*derive) return cmd_derive(derive_args, out);
        if (*moi) return cmd_moi(moi_args, out);
        if (*branches) return cmd_branches(branch_args, out);
        if (*multiplicity) {
            if (*index_opt) mult_args.index = mult_index;
            return cmd_multiplicity(mult_args, out);
        }
        if (*verify) return cmd_verify_iqp(iqp_args, out, err);
        if (*falsify_cmd) return cmd_falsify(falsify_args, false, out);
        if (*comm_cmd) return cmd_falsify(comm_args, true, out);
        if (*probe) return cmd_probe(probe_args, out);
        if (*report) return cmd_report(report_inputs, report_out, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << (e.is_numeric() ? "numeric failure: " : "usage error: ") << e.what() << '\n';
        return e.is_numeric() ? kNumeric : kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    err << "usage error: no subcommand\n";
    return kUsage;
}

} // namespace schatten::cli
