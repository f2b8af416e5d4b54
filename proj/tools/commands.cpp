#include "commands.hpp"

#include "fcs/fcs.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

namespace fcs::cli {
namespace {

using io::json;

void emit(const std::string &text, const std::string &path, std::ostream &out) {
    if (path.empty())
        out << text;
    else
        io::write_text_file(path, text);
}

int exit_code_for(const Error &e) {
    switch (e.kind()) {
        case ErrorKind::NullspaceDegenerate:
        case ErrorKind::NullspaceEmpty:
        case ErrorKind::NotPositive:
        case ErrorKind::NonConvergence:
        case ErrorKind::LineSearchFailed:
        case ErrorKind::AllStartsFailed: return kExitNumerical;
        default: return kExitUsage;
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return x;
}

double relative_difference_percent(double c) { return 100.0 * (known::kWoottersBound - c) / known::kWoottersBound; }

struct EvaluateArgs {
    std::string params_file;
    int b = 0;
    std::vector<double> alpha, phi;
    std::string out;
};

int cmd_evaluate(const EvaluateArgs &a, std::ostream &out) {
    const std::string started = io::utc_timestamp();
    ParameterVector p;
    if (!a.params_file.empty()) {
        p = io::params_from_document(io::read_json_file(a.params_file));
    } else {
        if (a.b == 0) throw Error(ErrorKind::InvalidArgument, "give --params FILE or --b with --alpha/--phi");
        p.b = a.b;
        p.alpha = a.alpha;
        p.phi = a.phi;
        p.validate();
    }
    const StateDiagnostics d = diagnose(p);
    io::RunRecord record;
    record.command = "evaluate";
    record.started_at = started;
    record.inputs = json{{"params", io::params_to_json(p)}};
    record.outputs = io::diagnostics_to_json(d);
    record.outputs["params"] = io::params_to_json(p);
    record.finished_at = io::utc_timestamp();
    emit(io::record_to_json(record).dump(2) + "\n", a.out, out);
    return kExitOk;
}

struct OptimizeArgs {
    int b = 0;
    int starts = 8;
    unsigned threads = 1;
    AnnealingConfig config;
    bool complex_r = false;
    bool non_nilpotent = false;
    std::string out;
    std::string trace;
};

int cmd_optimize(OptimizeArgs a, std::ostream &out, std::ostream &err) {
    const std::string started = io::utc_timestamp();
    a.config.options = {a.complex_r, a.non_nilpotent};
    a.config.record_trace = true;
    const OptimizationResult r = multi_start(a.b, a.config, a.starts, a.threads);
    for (const auto &s : r.starts)
        if (!s.ok) err << "start with seed " << s.seed << " failed: " << s.error << "\n";

    const double rel = relative_difference_percent(r.concurrence());
    io::RunRecord record;
    record.command = "optimize";
    record.started_at = started;
    record.inputs = json{{"b", a.b}, {"starts", a.starts}, {"threads", a.threads}, {"config", io::config_to_json(a.config)}};
    record.outputs = io::result_to_json(r);
    record.outputs["relative_difference_percent"] = rel;
    record.finished_at = io::utc_timestamp();
    if (!a.out.empty()) io::write_text_file(a.out, io::record_to_json(record).dump(2) + "\n");
    if (!a.trace.empty()) io::write_text_file(a.trace, io::trace_to_csv(r.trace));

    std::ostringstream line;
    line << std::fixed << "b=" << a.b << " concurrence=" << std::setprecision(6) << r.concurrence()
         << " relative_difference=" << std::setprecision(2) << rel << "% evals=" << r.evals
         << " converged=" << (r.converged ? "yes" : "no") << " stop=" << to_string(r.stop);
    out << line.str() << "\n";
    return kExitOk;
}

int cmd_scan_b2(int grid, const std::string &path, std::ostream &out) {
    if (grid < 2) throw Error(ErrorKind::InvalidArgument, "--grid must be at least 2");
    io::CsvWriter csv({"alpha1", "phi1", "concurrence", "assistance"});
    const auto alphas = linspace(0.0, std::numbers::pi, grid);
    const auto phis = linspace(-std::numbers::pi / 2.0, std::numbers::pi / 2.0, grid);
    for (double a : alphas)
        for (double f : phis)
            csv.row({io::format_double(a), io::format_double(f), io::format_double(analytic_concurrence_b2(a, f)),
                     io::format_double(analytic_assistance_b2(a, f))});
    emit(csv.str(), path, out);
    return kExitOk;
}

int cmd_report_cp(const std::vector<std::string> &files, int samples, const std::string &path, std::ostream &out) {
    if (files.empty()) throw Error(ErrorKind::InvalidArgument, "report-cp needs at least one result file");
    if (samples < 2) throw Error(ErrorKind::InvalidArgument, "--samples must be at least 2");
    io::CsvWriter csv({"set", "label", "purity", "concurrence"});
    for (const auto &file : files) {
        const ParameterVector p = io::params_from_document(io::read_json_file(file));
        const StateDiagnostics d = diagnose(p);
        csv.row({"optima", "b=" + std::to_string(p.b), io::format_double(d.purity12), io::format_double(d.concurrence)});
    }
    for (double q : linspace(0.0, 1.0, samples)) {
        const auto pt = mems_point(q);
        csv.row({"mems", "q=" + io::format_double(q), io::format_double(pt.purity), io::format_double(pt.concurrence)});
    }
    for (double p : linspace(0.0, 1.0, samples)) {
        const auto pt = werner_point(p);
        csv.row({"werner", "p=" + io::format_double(p), io::format_double(pt.purity), io::format_double(pt.concurrence)});
    }
    csv.row({"reference", "wootters_bound", "", io::format_double(known::kWoottersBound)});
    emit(csv.str(), path, out);
    return kExitOk;
}

int cmd_verify(const VerifyOptions &opts, std::ostream &out) {
    const VerifyReport report = run_verification(opts);
    out << std::left << std::setw(4) << "b" << std::setw(28) << "check" << std::right << std::setw(8) << "passed"
        << std::setw(8) << "failed" << std::setw(14) << "worst" << std::setw(10) << "tol"
        << "  status\n";
    for (const auto &c : report.checks) {
        out << std::left << std::setw(4) << c.b << std::setw(28) << c.name << std::right << std::setw(8) << c.passed
            << std::setw(8) << c.failed << std::setw(14) << std::setprecision(3) << std::scientific << c.worst
            << std::setw(10) << std::setprecision(0) << c.tolerance << std::defaultfloat << "  "
            << (c.ok() ? "ok" : "FAIL") << "\n";
    }
    for (std::size_t i = 0; i < opts.dims.size(); ++i)
        out << "b=" << opts.dims[i] << ": " << report.solved[i] << " draws checked, " << report.skipped[i]
            << " skipped (invariant-state solve failed)\n";
    out << "verify: " << (report.ok() ? "PASS" : "FAIL") << " (" << report.failures() << " failures)\n";
    return report.ok() ? kExitOk : kExitVerifyFailed;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Finitely correlated qubit chains: evaluation, optimization and checks", "fcs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    EvaluateArgs ev;
    auto *evaluate = app.add_subcommand("evaluate", "Report the chain properties of one parameter set");
    evaluate->add_option("--params", ev.params_file, "Parameter JSON (or a run record containing params)");
    evaluate->add_option("--b", ev.b, "Auxiliary dimension for inline parameters");
    evaluate->add_option("--alpha", ev.alpha, "Inline alpha angles (radians)")->delimiter(',');
    evaluate->add_option("--phi", ev.phi, "Inline phi angles (radians)")->delimiter(',');
    evaluate->add_option("--out", ev.out, "Write the JSON record here instead of stdout");

    OptimizeArgs op;
    auto *optimize = app.add_subcommand("optimize", "Maximise nearest-neighbour concurrence");
    optimize->add_option("--b", op.b, "Auxiliary dimension")->required()->check(CLI::Range(2, 64));
    optimize->add_option("--seed", op.config.seed, "Seed of the first start")->capture_default_str();
    optimize->add_option("--starts", op.starts, "Number of independent starts")->capture_default_str()->check(CLI::PositiveNumber);
    optimize->add_option("--threads", op.threads, "Worker threads for the starts")->capture_default_str();
    optimize->add_option("--nt", op.config.nt, "Step adjustments per temperature")->capture_default_str();
    optimize->add_option("--ns", op.config.ns, "Sweeps per step adjustment")->capture_default_str();
    optimize->add_option("--rt", op.config.rt, "Temperature reduction factor")->capture_default_str();
    optimize->add_option("--neps", op.config.neps, "Convergence window length")->capture_default_str();
    optimize->add_option("--eps", op.config.eps, "Convergence tolerance")->capture_default_str();
    optimize->add_option("--t0", op.config.t0, "Initial temperature")->capture_default_str();
    optimize->add_option("--max-evals", op.config.max_evals, "Evaluation budget per start")->capture_default_str();
    optimize->add_option("--out", op.out, "Write the JSON run record here");
    optimize->add_option("--trace", op.trace, "Write the best-so-far trace CSV here");
    optimize->add_flag("--complex-R", op.complex_r, "Use a complex unitary rotation factor");
    optimize->add_flag("--non-nilpotent", op.non_nilpotent, "Add the upper-diagonal v1 entries");

    int grid = 256;
    std::string scan_out;
    auto *scan = app.add_subcommand("scan-b2", "Closed-form b = 2 landscape on [0,pi] x [-pi/2,pi/2]");
    scan->add_option("--grid", grid, "Points per axis")->capture_default_str();
    scan->add_option("--out", scan_out, "CSV output (stdout if omitted)");

    std::vector<std::string> files;
    int samples = 200;
    std::string report_out;
    auto *report = app.add_subcommand("report-cp", "Concurrence versus purity data with MEMS and Werner curves");
    report->add_option("files", files, "Result or parameter JSON files")->required();
    report->add_option("--samples", samples, "Points per reference curve")->capture_default_str();
    report->add_option("--out", report_out, "CSV output (stdout if omitted)");

    VerifyOptions vo;
    auto *verify = app.add_subcommand("verify", "Run the invariant suite on random parameter draws");
    verify->add_option("--b", vo.dims, "Dimensions to check")->delimiter(',')->capture_default_str();
    verify->add_option("--seed", vo.seed, "Seed of the draws")->capture_default_str();
    verify->add_option("--draws", vo.draws, "Draws per dimension")->capture_default_str();
    verify->add_option("--window", vo.max_window, "Largest window for marginal checks")->capture_default_str();
    verify->add_flag("--corrupt-v2", vo.corrupt_v2, "Break unitality on purpose (negative control)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*evaluate) return cmd_evaluate(ev, out);
        if (*optimize) return cmd_optimize(op, out, err);
        if (*scan) return cmd_scan_b2(grid, scan_out, out);
        if (*report) return cmd_report_cp(files, samples, report_out, out);
        if (*verify) return cmd_verify(vo, out);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

} // namespace fcs::cli
