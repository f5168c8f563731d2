// qnet: command-line front end for the channel, processor and storage/retrieval routines.

#include "qnet/catalog.hpp"
#include "qnet/channel.hpp"
#include "qnet/io.hpp"
#include "qnet/processor.hpp"
#include "qnet/psar.hpp"
#include "qnet/schemes.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using qnet::io::InputError;
using qnet::io::json;

struct Common {
    std::string out;
    std::string format;  // empty: the command's own default
    std::string config;
    double tol = 1e-9;
};

struct Sweep {
    std::string noise = "dep";
    std::vector<std::size_t> Ns;
    std::vector<double> qs;
    std::vector<double> phis{0.0};
    std::size_t q_points = 0;  // 0: the command's own default
};

// Fills unset grids with per-command defaults.
Sweep with_defaults(Sweep s, std::vector<std::size_t> Ns, std::size_t q_points) {
    if (s.Ns.empty()) s.Ns = std::move(Ns);
    if (s.q_points == 0) s.q_points = q_points;
    return s;
}

std::string format_of(const Common& c, const std::string& fallback) { return c.format.empty() ? fallback : c.format; }

// Order-preserving map over sweep points; workers take strided slices.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F f) {
    std::vector<std::optional<T>> slots(n);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) slots[i] = f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<double> q_grid(const Sweep& s) {
    if (!s.qs.empty()) return s.qs;
    if (s.q_points < 2) throw InputError("--q-points must be at least 2");
    return qnet::default_q_grid(s.q_points);
}

qnet::Tolerances tolerances(double tol) {
    if (!(tol > 0.0)) throw InputError("--tol must be positive");
    qnet::Tolerances t;
    t.herm = t.psd = t.eq = tol;
    return t;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw InputError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

// A table with named columns, rendered as CSV or as {"columns": [...], "rows": [[...]]}.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    void write(std::ostream& os, const std::string& format) const {
        if (format == "json") {
            json j{{"columns", columns}, {"rows", rows}};
            os << j.dump(2) << '\n';
            return;
        }
        qnet::io::CsvWriter w(os);
        w.header(columns);
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << ',';
                const auto& c = r[i];
                if (c.is_number_float()) os << qnet::io::format_double(c.get<double>());
                else if (c.is_string()) os << c.get<std::string>();
                else os << c.dump();
            }
            os << '\n';
        }
    }
};

void require_json(const Common& c) {
    if (format_of(c, "json") != "json") throw InputError("this command only writes JSON; use --format json");
}

json report(const qnet::EquivalenceVerdict& v) {
    json j{{"kind", qnet::to_string(v.kind)}, {"holds", v.holds}, {"sampled", v.sampled}, {"detail", v.detail},
           {"residual", v.residual}};
    if (v.witness) j["witness"] = qnet::io::matrix_to_json(*v.witness);
    return j;
}

qnet::SuccessMeasurement parse_measurement(const std::string& s) {
    if (s == "uniform") return qnet::SuccessMeasurement::Uniform;
    if (s == "bell") return qnet::SuccessMeasurement::Bell;
    throw InputError("unknown success measurement '" + s + "'");
}

// Flag value, else the processor files' own "success_measurement", else uniform.
qnet::SuccessMeasurement pick_measurement(const std::string& flag, const std::vector<json>& files) {
    if (!flag.empty()) return parse_measurement(flag);
    std::string chosen;
    for (const auto& f : files)
        if (f.is_object() && f.contains("success_measurement")) {
            const auto m = f.at("success_measurement").get<std::string>();
            if (!chosen.empty() && chosen != m) throw InputError("processor files disagree on the success measurement");
            chosen = m;
        }
    return parse_measurement(chosen.empty() ? "uniform" : chosen);
}

// Config file keys are long option names; values given on the command line take precedence.
void apply_config(CLI::App* sub, const std::string& path) {
    if (path.empty() || sub == nullptr) return;
    const auto cfg = qnet::io::load_file(path);
    if (!cfg.is_object()) throw InputError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub->get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw InputError("config key '" + key + "' is not an option of '" + sub->get_name() + "'");
        }
        if (opt->count() > 0) continue;
        std::vector<std::string> vals;
        const auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (value.is_array())
            for (const auto& v : value) vals.push_back(text(v));
        else
            vals.push_back(text(value));
        for (const auto& v : vals) opt->add_result(v);
        opt->run_callback();
    }
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "write output to this file instead of stdout");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", c.tol, "numerical tolerance");
    sub->add_option("--config", c.config, "JSON file with option values; command-line flags win");
}

void add_sweep(CLI::App* sub, Sweep& s, bool with_phi) {
    sub->add_option("--noise", s.noise, "dep or pd")->check(CLI::IsMember({"dep", "pd", "depolarizing", "phase-damping"}));
    sub->add_option("--N", s.Ns, "comma-separated N values")->delimiter(',');
    sub->add_option("--q", s.qs, "comma-separated q values")->delimiter(',');
    sub->add_option("--q-points", s.q_points, "evenly spaced q values on [0,1] when --q is absent");
    if (with_phi) sub->add_option("--phi", s.phis, "comma-separated phases")->delimiter(',');
}

// ---- commands ----

void cmd_check_channel(const std::string& path, const Common& c) {
    require_json(c);
    const auto tol = tolerances(c.tol);
    const auto ch = qnet::io::parse_channel(qnet::io::load_file(path));
    const auto h = qnet::is_hermitian(ch, tol);
    const auto tp = qnet::is_trace_preserving(ch, tol);
    const auto cp = qnet::is_cp(ch, tol);
    json j{{"d_out", ch.out().dim},
           {"d_in", ch.in().dim},
           {"hermitian", {{"holds", h.holds}, {"residual", h.residual}}},
           {"trace_preserving", {{"holds", tp.holds}, {"residual", tp.residual}}},
           {"completely_positive", {{"holds", cp.holds}, {"residual", cp.residual}}},
           {"channel", tp.holds && cp.holds}};
    Output out(c.out);
    out.stream() << j.dump(2) << '\n';
}

struct ProcessorArgs {
    std::string processor, second, program, data, measurement;
    int samples = 20;
    double step = M_PI / 16;
};

void cmd_processor_implement(const ProcessorArgs& a, const Common& c) {
    require_json(c);
    const auto tol = tolerances(c.tol);
    const auto pj = qnet::io::load_file(a.processor);
    const auto g = qnet::io::parse_processor(pj);
    const auto meas = pick_measurement(a.measurement, {pj});
    const auto xi = qnet::io::parse_program(qnet::io::load_file(a.program));
    if (static_cast<std::size_t>(xi.rows()) != g.P) throw InputError("program dimension does not match P");
    try {
        qnet::check_program_state(xi, g.P, tol);
    } catch (const qnet::Error& e) {
        throw InputError(e.what());
    }
    const auto det = qnet::implement_det(g, xi, tol);
    // constant channel rho -> Tr(rho) sigma has Choi sigma (x) 1
    const qnet::ComplexMatrix sigma = qnet::partial_trace(det.op, {"in"}).matrix / double(g.D);
    const double const_res = qnet::max_abs(det.matrix() - qnet::kron(sigma, qnet::identity(g.D)));
    json dj{{"choi", qnet::io::matrix_to_json(det.matrix())},
            {"data_independent", const_res <= tol.eq},
            {"data_independent_residual", const_res}};
    if (const_res <= tol.eq) dj["output_state"] = qnet::io::matrix_to_json(sigma);

    const auto sc = qnet::success_choi(g, xi, meas);
    json pr{{"measurement", meas == qnet::SuccessMeasurement::Bell ? "bell" : "uniform"},
            {"success_choi", qnet::io::matrix_to_json(sc.matrix)}};
    const auto marg = qnet::partial_trace(sc, {"out"}).matrix;
    const qnet::cplx l = marg.trace() / double(g.D);
    const double chan_res = qnet::max_abs(marg - l * qnet::identity(g.D));
    pr["channel"] = chan_res <= tol.eq && l.real() > tol.eq;
    pr["channel_residual"] = chan_res;
    if (pr["channel"].get<bool>()) pr["p"] = l.real();
    if (!a.data.empty()) {
        const auto rho = qnet::io::parse_matrix(qnet::io::load_file(a.data));
        if (static_cast<std::size_t>(rho.rows()) != g.D || rho.rows() != rho.cols())
            throw InputError("data state dimension does not match D");
        const auto r = qnet::implement_prob(g, xi, rho, meas, tol);
        pr["p_data"] = r.p;
    }
    json j{{"D", g.D}, {"P", g.P}, {"deterministic", dj}, {"probabilistic", pr}};
    Output out(c.out);
    out.stream() << j.dump(2) << '\n';
}

void cmd_processor_equiv(const ProcessorArgs& a, const Common& c) {
    require_json(c);
    const auto gj = qnet::io::load_file(a.processor);
    const auto hj = qnet::io::load_file(a.second);
    const auto g = qnet::io::parse_processor(gj);
    const auto h = qnet::io::parse_processor(hj);
    if (g.D != h.D)
        throw InputError("data dimensions differ (" + std::to_string(g.D) + " vs " + std::to_string(h.D) + ")");
    if (a.samples < 1) throw InputError("--samples must be positive");
    const auto meas = pick_measurement(a.measurement, {gj, hj});
    const auto det = qnet::det_equiv_sampled(g, h, a.samples, 7, std::max(c.tol, 1e-8));
    const auto st = qnet::structural_equiv(g, h, meas, std::max(c.tol, 1e-8));
    const auto pairs = qnet::derived_program_pairs(g, h, meas);
    const auto pr = qnet::prob_equiv_compare(g, h, pairs, meas, c.tol);
    json j{{"D", g.D},
           {"P", {g.P, h.P}},
           {"measurement", meas == qnet::SuccessMeasurement::Bell ? "bell" : "uniform"},
           {"deterministic", report(det)},
           {"structural", report(st)},
           {"probabilistic", report(pr)}};
    Output out(c.out);
    out.stream() << j.dump(2) << '\n';
}

void cmd_swap_scan(const ProcessorArgs& a, const Common& c) {
    if (!(a.step > 0.0) || a.step > M_PI) throw InputError("--step must lie in (0, pi]");
    qnet::SwapScanOptions opt;
    opt.residual = std::max(c.tol, 1e-8);
    const auto pts = qnet::swap_equiv_scan(a.step, opt);
    Table t{{"x", "y", "z"}, {}};
    for (const auto& p : pts) t.rows.push_back({p[0], p[1], p[2]});
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

struct Point {
    std::size_t N;
    double q, phi;
};

std::vector<Point> points(const Sweep& s, bool with_phi) {
    if (s.Ns.empty()) throw InputError("--N list is empty");
    std::vector<Point> pts;
    const auto qs = q_grid(s);
    const std::vector<double> phis = with_phi ? s.phis : std::vector<double>{0.0};
    if (phis.empty()) throw InputError("--phi list is empty");
    for (auto N : s.Ns)
        for (double q : qs) {
            if (!(q >= 0.0 && q <= 1.0)) throw InputError("q values must lie in [0,1]");
            for (double phi : phis) pts.push_back({N, q, phi});
        }
    return pts;
}

void cmd_psar_run(const Sweep& s, const Common& c) {
    const auto kind = qnet::parse_noise(s.noise);
    for (auto N : s.Ns) qnet::check_pipeline_n(N);
    const auto pts = points(s, true);
    const auto recs = parallel_map<qnet::PsarRecord>(pts.size(), [&](std::size_t i) {
        return qnet::psar_run(kind, pts[i].N, pts[i].q, pts[i].phi);
    });
    Table t{{"noise", "N", "q", "phi", "p_suc", "alpha_fraction", "beta_fraction", "p_U", "fit_residual"}, {}};
    for (const auto& r : recs)
        t.rows.push_back({qnet::to_string(kind), r.N, r.q, r.phi, r.retrieved.p_success, r.retrieved.alpha_fraction(),
                          r.retrieved.beta_fraction(), r.retrieved.alpha, r.retrieved.residual});
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

void cmd_psar_closed(const Sweep& s, const Common& c) {
    const auto kind = qnet::parse_noise(s.noise);
    Table t{{"noise", "N", "q", "p_suc", "alpha_fraction", "beta_fraction", "p_U"}, {}};
    for (const auto& p : points(s, false)) {
        const auto f = kind == qnet::NoiseKind::DepolarizingMix ? qnet::dep_closed_form(p.N, p.q)
                                                                 : qnet::pd_closed_form(p.N, p.q);
        t.rows.push_back({qnet::to_string(kind), p.N, p.q, f.p_success, f.alpha_fraction, f.beta_fraction, f.p_unitary});
    }
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

// unitary weight and phase read off a qubit branch Choi prob [w |U_s>><<U_s| + (1-w) P]
std::pair<double, double> branch_weight(const qnet::ComplexMatrix& choi, double prob) {
    if (prob <= 0.0) return {0.0, 0.0};
    const auto off = choi(0, 3);
    return {std::abs(off) / prob, -std::arg(off)};
}

void cmd_vmc_run(const Sweep& s, const Common& c) {
    const auto kind = qnet::parse_noise(s.noise);
    for (auto N : s.Ns) {
        const auto k = qnet::registers_for(N);
        if (k > 3) throw qnet::BoundError("N=" + std::to_string(N) + " needs more than 3 registers; use 'vmc closed'");
    }
    const auto pts = points(s, true);
    const auto runs = parallel_map<std::vector<qnet::Branch>>(pts.size(), [&](std::size_t i) {
        return qnet::vmc_branch_chois({kind, pts[i].q, pts[i].phi}, qnet::registers_for(pts[i].N));
    });
    Table t{{"noise", "N", "q", "phi", "branch", "success", "prob", "unitary_weight", "phase", "uses"}, {}};
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t b = 0; b < runs[i].size(); ++b) {
            const auto& br = runs[i][b];
            const auto [w, ph] = branch_weight(br.state, br.prob);
            t.rows.push_back({qnet::to_string(kind), pts[i].N, pts[i].q, pts[i].phi, b + 1, br.success ? 1 : 0, br.prob, w,
                              ph, br.gates_used});
        }
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

void cmd_vmc_closed(const Sweep& s, const Common& c) {
    Table t{{"N", "q", "p_suc", "p_U"}, {}};
    for (const auto& p : points(s, false)) {
        const auto f = qnet::vmc_closed_form(p.N, p.q);
        t.rows.push_back({p.N, p.q, f.p_success, f.p_unitary});
    }
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

void cmd_vq_run(const Sweep& s, const Common& c) {
    const auto kind = qnet::parse_noise(s.noise);
    for (auto N : s.Ns) qnet::check_pipeline_n(N);
    const auto pts = points(s, true);
    const auto res = parallel_map<qnet::VQResult>(pts.size(), [&](std::size_t i) {
        return qnet::vq_run({pts[i].N, {kind, pts[i].q, pts[i].phi}, 1.0, 0.0});
    });
    Table t{{"noise", "N", "q", "phi", "p_suc", "p_U", "p_ab", "fit_residual"}, {}};
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.rows.push_back({qnet::to_string(kind), pts[i].N, pts[i].q, pts[i].phi, res[i].p_success, res[i].p_unitary,
                          res[i].p_ab, res[i].residual});
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

void cmd_vq_closed(const Sweep& s, const Common& c) {
    const auto kind = qnet::parse_noise(s.noise);
    Table t{{"noise", "N", "q", "p_suc", "p_U", "p_ab"}, {}};
    for (const auto& p : points(s, false)) {
        const auto f = kind == qnet::NoiseKind::DepolarizingMix ? qnet::vq_dep_closed(p.N, p.q) : qnet::vq_pd_closed(p.N, p.q);
        t.rows.push_back({qnet::to_string(kind), p.N, p.q, f.p_success, f.p_unitary, f.p_ab});
    }
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

void cmd_figures(const std::string& kind, const Sweep& s, const Common& c) {
    const auto& kinds = qnet::figure_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) throw InputError("unknown figure kind '" + kind + "'");
    const auto rows = qnet::figure_data(kind, q_grid(s));
    Table t{{"scheme", "noise", "N", "q", "p_suc", "p_U", "p_ab"}, {}};
    for (const auto& r : rows) t.rows.push_back({r.scheme, r.noise, r.N, r.q, r.p_suc, r.p_U, r.p_ab});
    Output out(c.out);
    t.write(out.stream(), format_of(c, "csv"));
}

int fail(const std::string& reason, int code) {
    std::string line = reason;
    std::replace(line.begin(), line.end(), '\n', ' ');
    std::cerr << "error: " << line << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum channels, programmable processors and noisy storage-and-retrieval schemes"};
    app.require_subcommand(1);

    Common common;
    Sweep sweep;
    ProcessorArgs pa;
    std::string channel_path, figure_kind;
    std::function<void()> action;
    CLI::App* active = nullptr;

    auto* check = app.add_subcommand("check-channel", "Hermiticity, trace preservation and complete positivity of a channel file");
    check->add_option("path", channel_path, "channel JSON file")->required();
    add_common(check, common);
    check->callback([&] { active = check; action = [&] { cmd_check_channel(channel_path, common); }; });

    auto* proc = app.add_subcommand("processor", "Programmable processor tools");
    proc->require_subcommand(1);
    auto* impl = proc->add_subcommand("implement", "Channels implemented by a processor for one program");
    impl->add_option("--processor", pa.processor, "processor JSON file")->required();
    impl->add_option("--program", pa.program, "program state JSON file")->required();
    impl->add_option("--data", pa.data, "data state JSON file for the success probability");
    impl->add_option("--measurement", pa.measurement, "success measurement: uniform or bell");
    add_common(impl, common);
    impl->callback([&] { active = impl; action = [&] { cmd_processor_implement(pa, common); }; });

    auto* eq = proc->add_subcommand("equiv", "Deterministic, structural and probabilistic equivalence of two processors");
    eq->add_option("first", pa.processor, "first processor JSON file")->required();
    eq->add_option("second", pa.second, "second processor JSON file")->required();
    eq->add_option("--measurement", pa.measurement, "success measurement: uniform or bell");
    eq->add_option("--samples", pa.samples, "random programs per direction for the deterministic check");
    add_common(eq, common);
    eq->callback([&] { active = eq; action = [&] { cmd_processor_equiv(pa, common); }; });

    auto* scan = proc->add_subcommand("swap-scan", "Grid points where exp(i(xXX+yYY+zZZ)) acts like SWAP");
    scan->add_option("--step", pa.step, "grid step over [0, pi)");
    add_common(scan, common);
    scan->callback([&] { active = scan; action = [&] { cmd_swap_scan(pa, common); }; });

    auto* psar = app.add_subcommand("psar", "Storage and retrieval of a noisy phase gate");
    psar->require_subcommand(1);
    auto* psar_run = psar->add_subcommand("run", "Dense simulation of the storage and retrieval pipeline (N <= 4)");
    add_sweep(psar_run, sweep, true);
    add_common(psar_run, common);
    psar_run->callback([&] { active = psar_run; action = [&] { cmd_psar_run(with_defaults(sweep, {1, 2, 3, 4}, 5), common); }; });
    auto* psar_closed = psar->add_subcommand("closed", "Closed-form success probability and channel fractions");
    add_sweep(psar_closed, sweep, false);
    add_common(psar_closed, common);
    psar_closed->callback([&] { active = psar_closed; action = [&] { cmd_psar_closed(with_defaults(sweep, {1, 2, 3, 4}, 5), common); }; });

    auto* vmc = app.add_subcommand("vmc", "Register-doubling gate teleportation scheme");
    vmc->require_subcommand(1);
    auto* vmc_run = vmc->add_subcommand("run", "Exact branch simulation (N in {1, 3, 7})");
    add_sweep(vmc_run, sweep, true);
    add_common(vmc_run, common);
    vmc_run->callback([&] { active = vmc_run; action = [&] { cmd_vmc_run(with_defaults(sweep, {1, 3, 7}, 5), common); }; });
    auto* vmc_closed = vmc->add_subcommand("closed", "Closed-form success and unitary probabilities");
    add_sweep(vmc_closed, sweep, false);
    add_common(vmc_closed, common);
    vmc_closed->callback([&] { active = vmc_closed; action = [&] { cmd_vmc_closed(with_defaults(sweep, {1, 3, 7}, 5), common); }; });

    auto* vq = app.add_subcommand("vq", "Virtual-qudit retrieval with a shift-down ancilla");
    vq->require_subcommand(1);
    auto* vq_run = vq->add_subcommand("run", "Dense simulation (N <= 4)");
    add_sweep(vq_run, sweep, true);
    add_common(vq_run, common);
    vq_run->callback([&] { active = vq_run; action = [&] { cmd_vq_run(with_defaults(sweep, {1, 2, 3, 4}, 5), common); }; });
    auto* vq_closed = vq->add_subcommand("closed", "Closed-form success probability and channel split");
    add_sweep(vq_closed, sweep, false);
    add_common(vq_closed, common);
    vq_closed->callback([&] { active = vq_closed; action = [&] { cmd_vq_closed(with_defaults(sweep, {1, 2, 3, 4}, 5), common); }; });

    auto* fig = app.add_subcommand("figures", "Comparison tables over N in {1, 3, 7, 15}");
    fig->add_option("kind", figure_kind, "dep-vs-pd | dep-schemes | pd-schemes | vq-dep-vs-pd")->required();
    fig->add_option("--q", sweep.qs, "comma-separated q values")->delimiter(',');
    fig->add_option("--q-points", sweep.q_points, "evenly spaced q values on [0,1] when --q is absent");
    add_common(fig, common);
    fig->callback([&] { active = fig; action = [&] { cmd_figures(figure_kind, with_defaults(sweep, {}, 21), common); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(e.what(), 2);
    }

    try {
        apply_config(active, common.config);
        if (action) action();
    } catch (const CLI::ParseError& e) {
        return fail(e.what(), 2);
    } catch (const qnet::BoundError& e) {
        return fail(e.what(), 3);
    } catch (const qnet::Error& e) {
        return fail(e.what(), 2);
    } catch (const nlohmann::json::exception& e) {
        return fail(e.what(), 2);
    } catch (const std::exception& e) {
        return fail(e.what(), 1);
    }
    return 0;
}
