#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "circlepat/cellgraph.hpp"
#include "circlepat/error.hpp"
#include "circlepat/feasibility.hpp"
#include "circlepat/geometry.hpp"
#include "circlepat/solver.hpp"

namespace circlepat::cli
{
namespace
{

using nlohmann::json;
using nlohmann::ordered_json;

// File-level trouble: unreadable input, unwritable output.
class IoError : public Error
{
public:
    using Error::Error;
};

std::string num(double x)
{
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const RunConfig& config, const std::string& text, std::ostream& out)
{
    if (!config.output) {
        out << text << '\n';
        return;
    }
    std::ofstream f(*config.output, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot write " + *config.output);
    }
    f << text << '\n';
    if (!f) {
        throw IoError("error writing " + *config.output);
    }
}

bool looks_inline(const std::string& s)
{
    const auto it = std::find_if(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); });
    return it != s.end() && *it == '{';
}

struct Problem
{
    GraphDocument doc;
    CurvatureTarget targets;
};

Problem load_graph_text(const std::string& text, const RunConfig& config)
{
    GraphDocument doc = parse_graph(text);
    CurvatureTarget targets;
    if (config.targets) {
        const std::string t = looks_inline(*config.targets) ? *config.targets : read_file(*config.targets);
        targets = parse_targets(doc.graph, t);
    } else if (doc.targets) {
        targets = *doc.targets;
    } else {
        throw ValidationError("no targets: give them in the input document or with --targets");
    }
    return Problem{std::move(doc), std::move(targets)};
}

Problem load_problem(const RunConfig& config)
{
    return load_graph_text(read_file(config.input), config);
}

std::string face_set(const WeightedCellGraph& g, const std::vector<std::size_t>& faces)
{
    std::string s = "{";
    for (std::size_t i = 0; i < faces.size(); ++i) {
        s += (i ? ", " : "") + g.face(faces[i]).id.str();
    }
    return s + "}";
}

ordered_json label_json(const Label& l)
{
    return l.is_number() ? ordered_json(l.number()) : ordered_json(l.text());
}

ordered_json face_labels(const WeightedCellGraph& g, const std::vector<std::size_t>& faces)
{
    ordered_json a = ordered_json::array();
    for (std::size_t f : faces) {
        a.push_back(label_json(g.face(f).id));
    }
    return a;
}

void print_certificate(const WeightedCellGraph& g, const FeasibilityReport& r, std::ostream& os)
{
    if (r.certificate) {
        os << "certificate: " << face_set(g, r.certificate->faces) << " margin " << num(r.certificate->margin) << " ("
           << to_string(r.certificate->source) << ")\n";
    } else {
        os << "certificate: none found (more than " << kMaxExhaustiveFaces << " faces)\n";
    }
}

SolverOptions solver_options(const RunConfig& config)
{
    SolverOptions o;
    o.tolerance = config.tol.value_or(kDefaultTolerance);
    o.max_iterations = config.max_iter;
    o.skip_feasibility = config.skip_feasibility;
    o.threads = config.threads;
    return o;
}

struct TargetMatch
{
    double residual = 0.0;
    std::size_t worst_face = 0;
};

TargetMatch target_match(const PatternMetric& m, const CurvatureTarget& t)
{
    TargetMatch r;
    for (std::size_t f = 0; f < t.values.size(); ++f) {
        const double d = std::abs(m.face_totals[f] - t.values[f]);
        if (d > r.residual) {
            r.residual = d;
            r.worst_face = f;
        }
    }
    return r;
}

struct Restart
{
    std::uint64_t seed = 0;
    double distance = 0.0;
    bool agrees = false;
};

ordered_json solution_json(const WeightedCellGraph& g, const CurvatureTarget& t, const SolverOptions& opts,
                           const SolveReport& rep, const PatternMetric& m, const AuditResiduals& a,
                           const std::optional<Restart>& restart)
{
    ordered_json doc;
    doc["graph"] = ordered_json::parse(serialize_graph(g, &t));

    ordered_json s;
    s["converged"] = rep.converged;
    s["tolerance"] = opts.tolerance;
    s["max_iterations"] = opts.max_iterations;
    s["feasibility_gate"] = !opts.skip_feasibility;
    s["threads"] = opts.threads;
    s["determinism"] = opts.threads == 1 ? "byte-identical across runs"
                                         : "equal within 1e-12 across runs and thread counts";
    s["iterations"] = rep.iterations;
    s["final_residual"] = rep.final_residual;
    s["linear_solver"] = rep.linear_solver;
    s["condition_estimate"] = rep.condition_estimate;
    s["omega"] = rep.omega;
    s["residual_history"] = rep.residual_history;
    s["step_lengths"] = rep.step_lengths;
    doc["solver"] = std::move(s);

    ordered_json faces = ordered_json::array();
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        ordered_json item;
        item["id"] = label_json(g.face(f).id);
        item["target"] = t.values[f];
        item["K"] = m.K[f];
        item["radius"] = m.radii[f];
        item["achieved_T"] = m.face_totals[f];
        item["cone_angle"] = m.center_cone_angles[f];
        item["area"] = m.face_areas[f];
        faces.push_back(std::move(item));
    }
    doc["faces"] = std::move(faces);

    ordered_json quads = ordered_json::array();
    for (const Quadrilateral& q : m.quads) {
        ordered_json item;
        item["edge_id"] = label_json(g.edge(q.edge).id);
        item["face_plus"] = label_json(g.face(q.face_plus).id);
        item["face_minus"] = label_json(g.face(q.face_minus).id);
        item["theta"] = q.theta;
        item["r_plus"] = q.r_plus;
        item["r_minus"] = q.r_minus;
        item["r3"] = q.r3;
        item["half_angle_plus"] = q.half_angle_plus;
        item["half_angle_minus"] = q.half_angle_minus;
        item["ell_plus"] = q.ell_plus;
        item["ell_minus"] = q.ell_minus;
        item["T_plus"] = q.T_plus;
        item["T_minus"] = q.T_minus;
        item["bigon_area"] = q.bigon_area;
        quads.push_back(std::move(item));
    }
    doc["quadrilaterals"] = std::move(quads);
    doc["vertex_cone_angles"] = m.vertex_cone_angles;
    doc["euler_characteristic"] = m.euler_characteristic;
    doc["areas"] = {{"disk_area_sum", m.disk_area_sum},
                    {"bigon_area_sum", m.bigon_area_sum},
                    {"total_area", m.total_area}};

    const TargetMatch tm = target_match(m, t);
    ordered_json au;
    au["per_bigon"] = {{"residual", a.per_bigon},
                       {"worst_edge", label_json(g.edge(a.worst_edge).id)},
                       {"tolerance", kBigonTolerance}};
    au["per_face"] = {{"residual", a.per_face},
                      {"worst_face", label_json(g.face(a.worst_face).id)},
                      {"tolerance", kFaceTolerance}};
    au["global"] = {{"residual", a.global},
                    {"lhs", a.global_lhs},
                    {"rhs", a.global_rhs},
                    {"tolerance", kGlobalTolerance}};
    au["target_match"] = {{"residual", tm.residual},
                          {"worst_face", label_json(g.face(tm.worst_face).id)},
                          {"tolerance", opts.tolerance}};
    doc["audit"] = std::move(au);

    if (restart) {
        doc["restart"] = {{"seed", restart->seed},
                          {"max_K_difference", restart->distance},
                          {"tolerance", kRestartTolerance},
                          {"agrees", restart->agrees}};
    }
    return doc;
}

bool audit_passes(const AuditResiduals& a)
{
    return a.per_bigon <= kBigonTolerance && a.per_face <= kFaceTolerance && a.global <= kGlobalTolerance;
}

// Shared by solve and export: solve, or report why not. Returns an exit code
// and leaves the report in `out_report` on success.
int solve_problem(const RunConfig& config, const Problem& p, SolveReport& out_report, std::ostream& err,
                  std::optional<std::string>* failed_doc = nullptr)
{
    const SolverOptions opts = solver_options(config);
    const WeightedCellGraph& g = p.doc.graph;
    try {
        out_report = solve(g, p.targets, opts);
        return kOk;
    } catch (const InfeasibleTargetsError& e) {
        err << "infeasible: " << e.what() << '\n';
        print_certificate(g, e.report(), err);
        return kInfeasible;
    } catch (const SolverConvergenceError& e) {
        err << "not converged: " << e.what() << '\n';
        if (failed_doc) {
            const SolveReport& rep = e.report();
            const PatternMetric m = reconstruct(g, rep.K, opts.threads);
            *failed_doc = solution_json(g, p.targets, opts, rep, m, audit(m, g), std::nullopt).dump(2);
        }
        return kNotConverged;
    }
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn)
{
    try {
        return fn();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
    } catch (const json::exception& e) {
        err << "parse error: " << e.what() << '\n';
    }
    return kInputError;
}

void check_config(const RunConfig& config)
{
    if (config.tol && !(*config.tol > 0.0)) {
        throw DomainError("--tol must be positive");
    }
    if (config.max_iter < 1) {
        throw DomainError("--max-iter must be at least 1");
    }
    if (config.threads < 1) {
        throw DomainError("--threads must be at least 1");
    }
}

const json& field(const json& obj, const char* key)
{
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(std::string("solution document lacks \"") + key + "\"");
    }
    return *it;
}

bool is_solution(const json& doc)
{
    return doc.is_object() && doc.contains("graph") && doc.contains("faces") && doc.contains("solver");
}

struct StoredSolution
{
    GraphDocument graph;
    CurvatureTarget targets;
    std::vector<double> K;
    double tolerance = kDefaultTolerance;
};

StoredSolution read_solution(const json& doc)
{
    StoredSolution s{parse_graph(field(doc, "graph").dump()), {}, {}, kDefaultTolerance};
    if (!s.graph.targets) {
        throw ParseError("solution document graph has no targets");
    }
    s.targets = *s.graph.targets;
    const json& faces = field(doc, "faces");
    const WeightedCellGraph& g = s.graph.graph;
    if (!faces.is_array() || faces.size() != g.num_faces()) {
        throw ParseError("solution document: \"faces\" does not match the graph");
    }
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        const json& id = field(faces[f], "id");
        const std::string text = id.is_string() ? id.get<std::string>() : id.dump();
        if (text != g.face(f).id.str()) {
            throw ParseError("solution document: face " + text + " out of order");
        }
        s.K.push_back(field(faces[f], "K").get<double>());
    }
    const json& solver = field(doc, "solver");
    if (solver.contains("tolerance")) {
        s.tolerance = solver["tolerance"].get<double>();
    }
    return s;
}

struct Worst
{
    double value = 0.0;
    std::string where;

    void see(double stored, double recomputed, const std::string& name)
    {
        const double d = std::abs(stored - recomputed);
        if (!(d <= value)) {
            value = d;
            where = name;
        }
    }
};

// Largest discrepancy between values stored in the document and the
// reconstruction from its K.
Worst stored_consistency(const json& doc, const PatternMetric& m, const WeightedCellGraph& g)
{
    Worst w;
    const json& faces = doc["faces"];
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        const std::string at = "faces[" + g.face(f).id.str() + "].";
        w.see(field(faces[f], "radius").get<double>(), m.radii[f], at + "radius");
        w.see(field(faces[f], "achieved_T").get<double>(), m.face_totals[f], at + "achieved_T");
        w.see(field(faces[f], "cone_angle").get<double>(), m.center_cone_angles[f], at + "cone_angle");
        w.see(field(faces[f], "area").get<double>(), m.face_areas[f], at + "area");
    }
    if (doc.contains("quadrilaterals")) {
        const json& quads = doc["quadrilaterals"];
        if (!quads.is_array() || quads.size() != m.quads.size()) {
            throw ParseError("solution document: \"quadrilaterals\" does not match the graph");
        }
        for (std::size_t e = 0; e < m.quads.size(); ++e) {
            const Quadrilateral& q = m.quads[e];
            const json& item = quads[e];
            const std::string at = "quadrilaterals[" + g.edge(e).id.str() + "].";
            w.see(field(item, "r3").get<double>(), q.r3, at + "r3");
            w.see(field(item, "half_angle_plus").get<double>(), q.half_angle_plus, at + "half_angle_plus");
            w.see(field(item, "half_angle_minus").get<double>(), q.half_angle_minus, at + "half_angle_minus");
            w.see(field(item, "T_plus").get<double>(), q.T_plus, at + "T_plus");
            w.see(field(item, "T_minus").get<double>(), q.T_minus, at + "T_minus");
            w.see(field(item, "bigon_area").get<double>(), q.bigon_area, at + "bigon_area");
        }
    }
    if (doc.contains("areas")) {
        w.see(field(doc["areas"], "total_area").get<double>(), m.total_area, "areas.total_area");
    }
    return w;
}

}  // namespace

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        check_config(config);
        const Problem p = load_problem(config);
        const WeightedCellGraph& g = p.doc.graph;
        FeasibilityOptions fo;
        fo.threads = config.threads;
        const FeasibilityReport r = find_coherent_system(g, p.targets, fo);

        std::ostringstream text;
        text << "faces: " << g.num_faces() << ", edges: " << g.num_edges() << ", euler characteristic "
             << g.euler_characteristic() << '\n';
        text << "verdict: " << (r.feasible ? "feasible" : "infeasible") << '\n';
        text << "optimal_slack: " << num(r.optimal_slack) << '\n';
        if (!r.feasible) {
            print_certificate(g, r, text);
        }

        ordered_json report;
        report["feasible"] = r.feasible;
        report["optimal_slack"] = r.optimal_slack;
        if (r.system) {
            report["coherent_system"] = {{"values", r.system->values}, {"slack", r.system->slack}};
        }
        if (r.certificate) {
            report["certificate"] = {{"faces", face_labels(g, r.certificate->faces)},
                                     {"margin", r.certificate->margin},
                                     {"source", to_string(r.certificate->source)}};
        }

        bool disagree = false;
        if (g.num_faces() <= kMaxExhaustiveFaces) {
            const SubsetVerdict v = exhaustive_subset_check(g, p.targets, config.threads);
            disagree = v.pass != r.feasible;
            text << "exhaustive: " << (v.pass ? "pass" : "fail") << " over " << v.subsets_checked
                 << " subsets, worst " << face_set(g, v.worst_subset) << " margin " << num(v.worst_margin) << '\n';
            if (!v.pass) {
                text << "smallest violation: " << face_set(g, v.smallest_violation) << " margin "
                     << num(v.smallest_violation_margin) << '\n';
            }
            report["exhaustive"] = {{"pass", v.pass},
                                    {"subsets_checked", v.subsets_checked},
                                    {"worst_subset", face_labels(g, v.worst_subset)},
                                    {"worst_margin", v.worst_margin},
                                    {"smallest_violation", face_labels(g, v.smallest_violation)}};
        } else {
            text << "exhaustive: skipped (more than " << kMaxExhaustiveFaces << " faces)\n";
        }
        out << text.str();
        if (config.output) {
            write_output(config, report.dump(2), out);
        }
        if (disagree) {
            err << "audit failure: linear program and subset enumeration disagree\n";
            return static_cast<int>(kAuditFailure);
        }
        return static_cast<int>(r.feasible ? kOk : kInfeasible);
    });
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        check_config(config);
        const Problem p = load_problem(config);
        const WeightedCellGraph& g = p.doc.graph;
        const SolverOptions opts = solver_options(config);

        SolveReport rep;
        std::optional<std::string> failed;
        if (const int code = solve_problem(config, p, rep, err, &failed); code != kOk) {
            if (failed) {
                write_output(config, *failed, out);
            }
            return code;
        }
        const PatternMetric m = reconstruct(g, rep.K, config.threads);
        const AuditResiduals a = audit(m, g);

        std::optional<Restart> restart;
        if (config.seed) {
            std::mt19937_64 rng(*config.seed);
            std::uniform_real_distribution<double> u(-2.0, 2.0);
            SolverOptions again = opts;
            again.skip_feasibility = true;
            again.compute_omega = false;
            std::vector<double> K0(g.num_faces());
            for (double& k : K0) {
                k = u(rng);
            }
            again.initial_K = std::move(K0);
            Restart rs;
            rs.seed = *config.seed;
            try {
                const SolveReport b = solve(g, p.targets, again);
                for (std::size_t f = 0; f < g.num_faces(); ++f) {
                    rs.distance = std::max(rs.distance, std::abs(b.K[f] - rep.K[f]));
                }
                rs.agrees = rs.distance <= kRestartTolerance;
            } catch (const SolverConvergenceError&) {
                rs.distance = std::numeric_limits<double>::infinity();
            }
            restart = rs;
        }

        write_output(config, solution_json(g, p.targets, opts, rep, m, a, restart).dump(2), out);
        err << "converged in " << rep.iterations << " iterations, residual " << num(rep.final_residual)
            << ", wall time " << rep.wall_time << " s\n";
        if (!audit_passes(a)) {
            err << "audit failure: per-bigon " << num(a.per_bigon) << ", per-face " << num(a.per_face)
                << ", global " << num(a.global) << '\n';
            return static_cast<int>(kAuditFailure);
        }
        if (restart && !restart->agrees) {
            err << "audit failure: restart from seed " << restart->seed << " landed " << num(restart->distance)
                << " away in K\n";
            return static_cast<int>(kAuditFailure);
        }
        return static_cast<int>(kOk);
    });
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        check_config(config);
        const json doc = json::parse(read_file(config.input));
        if (!is_solution(doc)) {
            throw ParseError("not a solution document");
        }
        const StoredSolution s = read_solution(doc);
        const WeightedCellGraph& g = s.graph.graph;
        const PatternMetric m = reconstruct(g, s.K, config.threads);
        const AuditResiduals a = audit(m, g);
        const TargetMatch tm = target_match(m, s.targets);
        const Worst stored = stored_consistency(doc, m, g);

        struct Identity
        {
            std::string name;
            double residual;
            double tolerance;
            std::string where;
        };
        const std::vector<Identity> ids{
            {"per-bigon Gauss-Bonnet", a.per_bigon, kBigonTolerance, "edge " + g.edge(a.worst_edge).id.str()},
            {"per-face Gauss-Bonnet", a.per_face, kFaceTolerance, "face " + g.face(a.worst_face).id.str()},
            {"global Gauss-Bonnet", a.global, kGlobalTolerance,
             "area " + num(a.global_lhs) + " vs " + num(a.global_rhs)},
            {"target match", tm.residual, config.tol.value_or(s.tolerance),
             "face " + g.face(tm.worst_face).id.str()},
            {"stored values", stored.value, kStoredTolerance, stored.where},
        };

        const Identity* worst = nullptr;
        double worst_ratio = 0.0;
        bool ok = true;
        for (const Identity& id : ids) {
            const bool pass = id.residual <= id.tolerance;
            ok = ok && pass;
            out << id.name << ": " << num(id.residual) << " (tolerance " << num(id.tolerance) << ") "
                << (pass ? "ok" : "FAIL") << '\n';
            const double ratio = id.residual / id.tolerance;
            if (!pass && (!worst || !(ratio <= worst_ratio))) {
                worst = &id;
                worst_ratio = ratio;
            }
        }
        if (!ok) {
            err << "audit failure: worst identity " << worst->name << " at " << worst->where << ", residual "
                << num(worst->residual) << '\n';
            return static_cast<int>(kAuditFailure);
        }
        out << "verified\n";
        return static_cast<int>(kOk);
    });
}

int cmd_export(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        check_config(config);
        const std::string text = read_file(config.input);
        const json doc = json::parse(text, nullptr, false);
        if (is_solution(doc)) {
            const StoredSolution s = read_solution(doc);
            const PatternMetric m = reconstruct(s.graph.graph, s.K, config.threads);
            write_output(config, export_net(m, s.graph.graph), out);
            return static_cast<int>(kOk);
        }
        const Problem p = load_graph_text(text, config);
        SolveReport rep;
        if (const int code = solve_problem(config, p, rep, err); code != kOk) {
            return code;
        }
        const PatternMetric m = reconstruct(p.doc.graph, rep.K, config.threads);
        write_output(config, export_net(m, p.doc.graph), out);
        return static_cast<int>(kOk);
    });
}

int run_config(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    if (config.command == "check") {
        return cmd_check(config, out, err);
    }
    if (config.command == "solve") {
        return cmd_solve(config, out, err);
    }
    if (config.command == "verify") {
        return cmd_verify(config, out, err);
    }
    if (config.command == "export") {
        return cmd_export(config, out, err);
    }
    err << "unknown command: " << config.command << '\n';
    return kInputError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Circle patterns with prescribed total geodesic curvatures", "cpattern"};
    app.require_subcommand(1);
    RunConfig config;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--input", config.input, "graph document, or a solution document for verify/export")
            ->required();
        sub->add_option("--targets", config.targets, "targets file, or an inline JSON object");
        sub->add_option("--tol", tol, "residual tolerance (sup-norm)")->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", config.max_iter, "Newton iteration limit")->check(CLI::PositiveNumber);
        sub->add_flag("--skip-feasibility", config.skip_feasibility, "run the solver without the feasibility gate");
        sub->add_option("--threads", config.threads, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_option("--output", config.output, "output file (default: standard output)");
        sub->add_option("--seed", seed, "also solve from a random start drawn with this seed");
        sub->callback([&config, name] { config.command = name; });
    };
    add("check", "decide feasibility of the targets");
    add("solve", "compute the circle pattern and write a solution document");
    add("verify", "re-audit a solution document");
    add("export", "write the quadrilateral net");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kInputError);
    }
    config.tol = tol;
    config.seed = seed;
    return run_config(config, out, err);
}

}  // namespace circlepat::cli
