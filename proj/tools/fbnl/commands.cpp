#include "commands.hpp"

#include "output.hpp"

#include "fbnl/acceptance.hpp"
#include "fbnl/comparison_geometry.hpp"
#include "fbnl/energy_minimizer.hpp"
#include "fbnl/error.hpp"
#include "fbnl/field_io.hpp"
#include "fbnl/frac_quadrature.hpp"
#include "fbnl/functionals.hpp"
#include "fbnl/profile.hpp"
#include "fbnl/weighted_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

namespace fbnl::cli {

namespace {

using nlohmann::json;
using Fn2 = std::function<double(double, double)>;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Run {
    const Invocation& inv;
    const Config& cfg;
    RunOutput out;
    Params params;  // with n from the config
    Params params2d; // n = 1, for grids and profiles
    json grid = json::object();

    explicit Run(const Invocation& i)
        : inv(i), cfg(i.cfg), out(i.out_dir, i.command),
          params(derive_exponents(cfg.real("params.s", 0.5), cfg.real("params.gamma", 0.5),
                                  cfg.integer("params.n", 1))),
          params2d(derive_exponents(params.s, params.gamma, 1))
    {
    }

    void finish() { out.finish(cfg, params, grid, inv.threads); }
};

std::string csv_row(std::initializer_list<double> v)
{
    std::string s;
    for (double x : v) {
        if (!s.empty())
            s += ',';
        s += num17(x);
    }
    return s + "\n";
}

std::vector<double> linspace(double a, double b, int n)
{
    if (n < 2)
        throw ParameterError("a sweep needs at least 2 points");
    std::vector<double> v;
    for (int k = 0; k < n; ++k)
        v.push_back(a + (b - a) * k / (n - 1));
    return v;
}

std::shared_ptr<const Grid2D> make_grid(Run& r)
{
    const Config& c = r.cfg;
    const int nx = c.integer("grid.nx", 256), ny = c.integer("grid.ny", nx);
    const double Lx = c.real("grid.Lx", 1.0), Ly = c.real("grid.Ly", 1.0);
    const double q = c.real("grid.q", default_grading(r.params2d));
    const double xc = c.real("grid.xcenter", 0.0);
    auto g = std::make_shared<const Grid2D>(
        build_grid_range(nx, ny, xc - Lx, xc + Lx, Ly, q, r.params2d));
    r.grid = {{"nx", nx}, {"ny", ny}, {"Lx", Lx}, {"Ly", Ly}, {"q", q}, {"xcenter", xc}};
    return g;
}

void record_grid(Run& r, const Grid2D& g)
{
    r.grid = {{"nx", g.nx},      {"ny", g.ny}, {"Lx", g.Lx()},
              {"Ly", g.Ly},      {"q", g.q},   {"xcenter", g.x_center()}};
}

// "flux" selects the amplitude consistent with the discrete energy.
double amplitude_from(const Run& r, const std::string& key)
{
    const std::string v = r.cfg.str(key, "flux");
    if (v == "flux")
        return amplitude_A(r.params2d).amplitude_A_flux;
    if (v == "closed")
        return amplitude_A(r.params2d).amplitude_A;
    return r.cfg.real(key, 1.0);
}

std::shared_ptr<const Profile> profile_with(const Run& r, const std::string& key)
{
    return std::make_shared<const Profile>(
        with_amplitude(solve_profile(r.params2d), amplitude_from(r, key)));
}

Fn2 trace_file_data(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ParameterError("cannot read trace file " + path);
    std::vector<double> xs, vs;
    double x, v;
    while (is >> x >> v) {
        if (!xs.empty() && !(x > xs.back()))
            throw ParameterError("trace file abscissae must increase");
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 2)
        throw ParameterError("trace file needs at least two 'x value' lines");
    return [xs, vs](double xq, double) {
        if (xq <= xs.front())
            return vs.front();
        if (xq >= xs.back())
            return vs.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), xq);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double t = (xq - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - t) * vs[i] + t * vs[i + 1];
    };
}

Fn2 boundary_data(const Run& r, std::shared_ptr<const Profile>& prof)
{
    const std::string bc = r.cfg.str("minimize.bc", "halfplane");
    if (bc == "halfplane") {
        prof = profile_with(r, "minimize.amplitude");
        const double shift = r.cfg.real("minimize.shift", 0.0);
        const double tilt = r.cfg.real("minimize.tilt", 0.0);
        auto p = prof;
        return [p, shift, tilt](double x, double y) {
            return eval_halfplane(*p, x - shift, y) * (1.0 + tilt * x);
        };
    }
    prof = profile_with(r, "minimize.amplitude");
    if (bc == "constant") {
        const double c = r.cfg.real("minimize.constant", 1.0);
        return [c](double, double) { return c; };
    }
    if (bc == "trace")
        return trace_file_data(r.cfg.str("minimize.trace_file", ""));
    throw ParameterError("minimize.bc must be halfplane, constant, or trace");
}

MinimizeConfig minimize_config(const Run& r)
{
    MinimizeConfig m = default_minimize_config(r.cfg.real("minimize.trace_scale", 1.0));
    m.delta_schedule = r.cfg.reals("minimize.schedule", m.delta_schedule);
    m.max_outer = r.cfg.integer("minimize.max_outer", m.max_outer);
    m.fb_search = r.cfg.flag("minimize.fb_search", m.fb_search);
    m.fb_threshold = r.cfg.real("minimize.fb_threshold", m.fb_threshold);
    validate(m);
    return m;
}

struct Minimized {
    Field field;
    MinimizeConfig mcfg;
    FreeBoundaryReport fb;
    std::shared_ptr<const Profile> profile;
};

void write_minimizer_outputs(Run& r, const MinimizeResult& res, const FreeBoundaryReport& fb)
{
    std::ostringstream fs;
    write_field(fs, res.field);
    r.out.write("field.txt", fs.str(), "minimize_energy");

    std::string log = "stage,delta,outer,energy_reg,energy,contact_nodes,active_set_iterations\n";
    for (const EnergyLogEntry& e : res.log)
        log += std::to_string(e.stage) + "," + num17(e.delta) + "," + std::to_string(e.outer) +
               "," + num17(e.energy_reg) + "," + num17(e.energy) + "," +
               std::to_string(e.contact_nodes) + "," + std::to_string(e.active_set_iterations) +
               "\n";
    r.out.write("energy_log.csv", log, "minimize_energy");

    json j;
    j["fb_points"] = fb.fb_points;
    j["fb_orientation"] = fb.fb_orientation;
    j["contact_measure"] = fb.contact_measure;
    j["trace_length"] = fb.trace_length;
    j["energy"] = res.energy;
    j["dirichlet_part"] = res.dirichlet_part;
    j["trace_part"] = res.trace_part;
    r.out.write_json("free_boundary.json", j, "extract_free_boundary");
}

// The field for the functional sweeps: a snapshot from input.field, or a
// fresh minimizer run with the [minimize] settings.
Minimized obtain_field(Run& r)
{
    Minimized m;
    m.mcfg = minimize_config(r);
    const std::string path = r.cfg.str("input.field", "");
    if (!path.empty()) {
        m.field = read_field(path);
        const Params& fp = m.field.grid->params;
        if (std::abs(fp.s - r.params.s) > 1e-14 || std::abs(fp.gamma - r.params.gamma) > 1e-14)
            throw ParameterError("snapshot exponents differ from params.s / params.gamma");
        record_grid(r, *m.field.grid);
        m.profile = profile_with(r, "sweep.amplitude");
    } else {
        auto grid = make_grid(r);
        std::shared_ptr<const Profile> prof;
        const Fn2 data = boundary_data(r, prof);
        MinimizeResult res = minimize_energy(grid, data, m.mcfg);
        m.field = res.field;
        m.fb = extract_free_boundary(m.field, m.mcfg);
        write_minimizer_outputs(r, res, m.fb);
        m.profile = r.cfg.has("sweep.amplitude") ? profile_with(r, "sweep.amplitude") : prof;
    }
    if (m.fb.fb_points.empty())
        m.fb = extract_free_boundary(m.field, m.mcfg);
    return m;
}

// x0 and nu: explicit, or the free-boundary point nearest the grid center.
std::pair<double, int> sweep_center(const Run& r, const Minimized& m)
{
    double x0;
    int nu;
    if (r.cfg.str("sweep.x0", "auto") == "auto") {
        if (m.fb.fb_points.empty())
            throw DomainError("no free-boundary point; set sweep.x0");
        const double xc = m.field.grid->x_center();
        std::size_t best = 0;
        for (std::size_t k = 1; k < m.fb.fb_points.size(); ++k)
            if (std::abs(m.fb.fb_points[k] - xc) < std::abs(m.fb.fb_points[best] - xc))
                best = k;
        x0 = m.fb.fb_points[best];
        nu = m.fb.fb_orientation[best];
    } else {
        x0 = r.cfg.real("sweep.x0", 0.0);
        nu = 1;
    }
    if (r.cfg.str("sweep.nu", "auto") != "auto")
        nu = r.cfg.integer("sweep.nu", 1);
    if (nu != 1 && nu != -1)
        throw ParameterError("sweep.nu must be 1 or -1");
    return {x0, nu};
}

std::vector<double> sweep_radii(const Run& r)
{
    return linspace(r.cfg.real("sweep.rmin", 0.05), r.cfg.real("sweep.rmax", 0.45),
                    r.cfg.integer("sweep.count", 20));
}

std::string sweep_csv(const Field& u, double x0, const FunctionalSweep& sw)
{
    std::string csv = "R,value,forward_diff,defect\n";
    for (std::size_t k = 0; k < sw.radii.size(); ++k) {
        const double fd = k < sw.forward_differences.size() ? sw.forward_differences[k] : kNaN;
        const double defect = k < sw.defects.size() ? sw.defects[k]
                                                    : homogeneity_defect(u, x0, sw.radii[k]);
        csv += csv_row({sw.radii[k], sw.values[k], fd, defect});
    }
    return csv;
}

json sweep_json(const FunctionalSweep& sw, double x0, int nu)
{
    return {{"x0", x0},
            {"nu", nu},
            {"violation_count", sw.violation_count},
            {"tol_mono", sw.tol_mono},
            {"tol_constant", sw.tol_constant},
            {"tolerances", sw.tolerances}};
}

int cmd_constants(Run& r)
{
    const auto row = [](const Params& P) {
        const QuadValue a1 = compute_A1(P), a2 = compute_A2(P);
        const HalfPlaneConstants hc = amplitude_A(P);
        return json{{"s", P.s},       {"gamma", P.gamma},      {"C1s", kernel_constant(P.s)},
                    {"A1", a1.value}, {"A2", a2.value},        {"A", hc.amplitude_A},
                    {"A_flux", hc.amplitude_A_flux},           {"d", hc.extension_d},
                    {"err_A1", a1.error},                      {"err_A2", a2.error}};
    };
    const json j = row(r.params2d);
    r.out.write_json("constants.json", j, "amplitude_A");
    std::cout << j.dump(2) << "\n";
    if (r.cfg.has("constants.gamma_list")) {
        std::string csv = "gamma,C1s,A1,A2,A,err_A1,err_A2\n";
        for (double g : r.cfg.reals("constants.gamma_list", {})) {
            const json e = row(derive_exponents(r.params.s, g));
            csv += csv_row({g, e["C1s"], e["A1"], e["A2"], e["A"], e["err_A1"], e["err_A2"]});
        }
        r.out.write("constants_sweep.csv", csv, "amplitude_A");
    }
    return 0;
}

int cmd_profile(Run& r)
{
    const Profile p = solve_profile(r.params2d);
    const AngularTable f = compute_f(p), F = compute_F(p);
    std::string csv = "theta,g,g_prime,f,F\n";
    for (std::size_t k = 1; k + 1 < f.theta.size(); ++k) {
        const double th = f.theta[k];
        csv += csv_row({th, p.g(th), p.dg(th), f.value[k], F.value[k]});
    }
    r.out.write("profile.csv", csv, "solve_profile");
    const double res = max_ode_residual(p);
    json j = {{"measured_slope", p.measured_slope}, {"min_f", f.min_value},
              {"sup_absF", F.sup_abs},              {"residual_max", res},
              {"f_0", f.numeric_0},                 {"f_pi", f.numeric_pi},
              {"F_0", F.numeric_0},                 {"F_pi", F.numeric_pi},
              {"g_pi", p.g(M_PI)},                  {"shooting_iterations", p.shooting_iterations}};
    r.out.write_json("profile_summary.json", j, "solve_profile");
    r.out.add_check("ode residual", res <= 1e-6, res, 1e-6, "max_ode_residual");
    r.out.add_check("min f positive", f.min_value > 0.0, f.min_value, 0.0, "compute_f");
    return 0;
}

int cmd_extend(Run& r)
{
    const int n = r.cfg.integer("grid.nx", 256);
    const double window = r.cfg.real("extend.window", 1.0);
    const ExtensionReport e = extension_crosscheck(r.params2d, window, n, n);
    r.grid = {{"nx", n}, {"ny", n}, {"window", window}};
    std::string csv = "x,flux,frac_laplacian,ratio\n";
    for (std::size_t k = 0; k < e.x.size(); ++k)
        csv += csv_row({e.x[k], e.flux[k], e.frac_laplacian[k], e.ratio[k]});
    r.out.write("extend.csv", csv, "extension_crosscheck");
    json j = {{"d_fit", e.d_fit},
              {"d_spread", e.d_spread},
              {"d_theory", e.d_theory},
              {"flux_rel_error", e.flux_rel_error},
              {"max_two_term_disagreement", e.max_two_term_disagreement}};
    r.out.write_json("extend.json", j, "extension_crosscheck");
    if (std::isfinite(e.d_fit)) {
        const double rel = std::abs(e.d_fit / e.d_theory - 1.0);
        r.out.add_check("d against theory", rel <= 0.02, rel, 0.02, "extension_crosscheck");
    }
    return 0;
}

int cmd_minimize(Run& r)
{
    auto grid = make_grid(r);
    std::shared_ptr<const Profile> prof;
    const Fn2 data = boundary_data(r, prof);
    const MinimizeConfig m = minimize_config(r);
    const MinimizeResult res = minimize_energy(grid, data, m);
    const FreeBoundaryReport fb = extract_free_boundary(res.field, m);
    write_minimizer_outputs(r, res, fb);
    return 0;
}

int cmd_weiss(Run& r)
{
    const Minimized m = obtain_field(r);
    const auto [x0, nu] = sweep_center(r, m);
    const FunctionalSweep sw =
        weiss_sweep(m.field, x0, sweep_radii(r), r.cfg.real("sweep.tol_constant", 1.0));
    r.out.write("weiss.csv", sweep_csv(m.field, x0, sw), "weiss_sweep");
    r.out.write_json("weiss.json", sweep_json(sw, x0, nu), "weiss_sweep");
    r.out.add_check("weiss violations", sw.violation_count == 0, sw.violation_count, 0.0,
                    "weiss_sweep");
    return 0;
}

int cmd_monneau(Run& r)
{
    const Minimized m = obtain_field(r);
    const auto [x0, nu] = sweep_center(r, m);
    const FunctionalSweep sw = monneau_sweep(m.field, *m.profile, x0, nu, sweep_radii(r),
                                             r.cfg.real("sweep.tol_constant", 1.0));
    r.out.write("monneau.csv", sweep_csv(m.field, x0, sw), "monneau_sweep");
    json j = sweep_json(sw, x0, nu);
    j["amplitude"] = m.profile->amplitude;
    r.out.write_json("monneau.json", j, "monneau_sweep");
    r.out.add_check("monneau violations", sw.violation_count == 0, sw.violation_count, 0.0,
                    "monneau_sweep");
    return 0;
}

int cmd_blowup(Run& r)
{
    const Minimized m = obtain_field(r);
    const auto [x0, nu] = sweep_center(r, m);
    const double r0 = r.cfg.real("blowup.r0", 0.8), ratio = r.cfg.real("blowup.ratio", 0.6);
    const int count = r.cfg.integer("blowup.count", 8);
    if (!(ratio > 0.0 && ratio < 1.0) || !(r0 > 0.0) || count < 2)
        throw ParameterError("blowup needs r0 > 0, 0 < ratio < 1, count >= 2");
    std::vector<double> rl;
    for (int k = 0; k < count; ++k)
        rl.push_back(r0 * std::pow(ratio, k));
    const BlowupReport b =
        blowup_sequence(m.field, x0, rl, *m.profile, r.cfg.integer("blowup.ref_n", 64));
    std::string csv = "R,value,forward_diff,defect\n";
    for (std::size_t k = 0; k < b.radii.size(); ++k) {
        const double v = k == 0 ? kNaN : b.successive_distances[k - 1];
        const double next = k + 1 < b.radii.size() ? b.successive_distances[k] : kNaN;
        csv += csv_row({b.radii[k], v, k == 0 ? kNaN : next - v,
                        homogeneity_defect(m.field, x0, b.radii[k])});
    }
    r.out.write("blowup.csv", csv, "blowup_sequence");
    // Monotonicity of W over the accepted radii backs the convergence of the sequence.
    std::vector<double> inc(b.radii.rbegin(), b.radii.rend());
    FunctionalSweep sw;
    if (inc.size() >= 2)
        sw = weiss_sweep(m.field, x0, inc, r.cfg.real("sweep.tol_constant", 1.0));
    json j = {{"x0", x0},
              {"violation_count", sw.violation_count},
              {"tolerances", sw.tolerances},
              {"nu", nu},
              {"rejected_radii", b.rejected_radii},
              {"truncated", b.truncated},
              {"best_orientation", b.best_orientation},
              {"final_distance", b.final_distance},
              {"final_relative_distance", b.final_relative_distance}};
    r.out.write_json("blowup.json", j, "blowup_sequence");
    return 0;
}

int cmd_density(Run& r)
{
    Minimized m = obtain_field(r);
    std::vector<double> radii;
    const double rmax = r.cfg.real("density.rmax", 0.5);
    for (int k = 0; k < r.cfg.integer("density.count", 6); ++k)
        radii.push_back(rmax * std::pow(0.5, k));
    const std::vector<GrowthFit> gf = measure_nondegeneracy(m.field, m.fb, radii);
    measure_density(m.field, m.fb, radii, m.mcfg.fb_threshold);
    std::string csv = "point,x0,radius,ratio,sup_u\n";
    for (std::size_t p = 0; p < m.fb.density_ratios.size(); ++p)
        for (std::size_t k = 0; k < m.fb.density_ratios[p].size(); ++k)
            csv += std::to_string(p) + "," +
                   csv_row({m.fb.fb_points[p], m.fb.density_radii[k], m.fb.density_ratios[p][k],
                            p < gf.size() && k < gf[p].sup_values.size() ? gf[p].sup_values[k]
                                                                          : kNaN});
    r.out.write("density.csv", csv, "measure_density");
    const double beta = m.field.grid->params.beta;
    json fits = json::array();
    double worst = 0.0;
    for (const GrowthFit& f : gf) {
        fits.push_back({{"x0", f.x0}, {"slope", f.slope}, {"intercept", f.intercept}});
        worst = std::max(worst, std::abs(f.slope - beta));
    }
    json j = {{"density_inf", m.fb.density_inf}, {"beta", beta}, {"growth", fits}};
    r.out.write_json("density.json", j, "measure_nondegeneracy");
    r.out.add_check("growth exponent within beta +- 0.1", worst <= 0.1, worst, 0.1,
                    "measure_nondegeneracy");
    r.out.add_check("density lower bound above 0.05", m.fb.density_inf > 0.05, m.fb.density_inf,
                    0.05, "measure_density");
    return 0;
}

int cmd_domvar(Run& r)
{
    const int n = r.params.n;
    auto prof = std::make_shared<const Profile>(solve_profile(r.params2d));
    const double eps = r.cfg.real("domvar.epsilon", 0.1);
    const std::string cand = r.cfg.str("domvar.candidate", "translate");
    PointFnN g;
    std::shared_ptr<RadialSubsolution> sub;
    std::shared_ptr<Field> field;
    if (cand == "translate") {
        const double delta = r.cfg.real("domvar.delta", eps);
        g = [prof, delta, n](const std::vector<double>& X) {
            return eval_halfplane(*prof, X[n - 1] + delta, X[n]);
        };
    } else if (cand == "halfplane") {
        g = [prof, n](const std::vector<double>& X) { return eval_halfplane(*prof, X[n - 1], X[n]); };
    } else if (cand == "rotated") {
        sub = std::make_shared<RadialSubsolution>(
            make_radial_subsolution(r.params, r.cfg.real("domvar.R", 20.0), prof));
        g = [sub](const std::vector<double>& X) { return eval_vR(*sub, X); };
    } else if (cand == "field") {
        if (n != 1)
            throw ParameterError("domvar candidate 'field' needs params.n = 1");
        field = std::make_shared<Field>(read_field(r.cfg.str("input.field", "")));
        record_grid(r, *field->grid);
        g = [field](const std::vector<double>& X) { return field->eval(X[0], X[1]); };
    } else {
        throw ParameterError("domvar.candidate must be translate, halfplane, rotated, or field");
    }
    const auto pts = half_ball_lattice(n, r.cfg.real("domvar.radius", 0.5),
                                       r.cfg.real("domvar.spacing", 0.1));
    std::string csv;
    for (int k = 1; k <= n; ++k)
        csv += "x" + std::to_string(k) + ",";
    csv += "z,w,roots,multivalued" + std::string(sub ? ",gamma_R" : "") + "\n";
    int no_root = 0, multi = 0;
    for (const auto& X : pts) {
        std::string row;
        for (double v : X)
            row += num17(v) + ",";
        try {
            const DomainVariationSample smp = domain_variation(g, *prof, eps, X);
            row += num17(smp.w) + "," + std::to_string(smp.roots.size()) + "," +
                   (smp.multivalued ? "1" : "0");
            multi += smp.multivalued;
        } catch (const DomainError&) {
            row += num17(kNaN) + ",0,0";
            ++no_root;
        }
        if (sub)
            row += "," + num17(gamma_R(r.params, sub->R, X));
        csv += row + "\n";
    }
    r.out.write("domvar.csv", csv, "domain_variation");
    json j = {{"candidate", cand},
              {"epsilon", eps},
              {"samples", pts.size()},
              {"no_root", no_root},
              {"multivalued", multi}};
    r.out.write_json("domvar.json", j, "domain_variation");
    return 0;
}

int cmd_subsolution(Run& r)
{
    const Params& P = r.params;
    auto prof = profile_with(r, "subsolution.amplitude");
    std::vector<std::array<double, 2>> smp;
    for (double t : r.cfg.reals("subsolution.t", {0.0}))
        for (double z : linspace(r.cfg.real("subsolution.zmin", 0.1),
                                 r.cfg.real("subsolution.zmax", 1.0),
                                 r.cfg.integer("subsolution.zcount", 10)))
            smp.push_back({t, z});
    const std::vector<double> tn = r.cfg.reals("subsolution.neumann_t", {0.05, 0.1, 0.2, 0.5, 1.0});
    json sweep = json::array();
    for (double R : r.cfg.reals("subsolution.R", {20.0, 40.0, 80.0})) {
        const RadialSubsolution sub = make_radial_subsolution(P, R, prof);
        const SubsolutionReport rep = subsolution_residual(sub, smp);
        json e = {{"R", R},
                  {"min_residual", rep.min_residual},
                  {"R0", rep.R0},
                  {"R0_closed", rep.R0_closed},
                  {"bisection_iterations", rep.bisection_iterations},
                  {"trivially_satisfied", rep.trivially_satisfied}};
        if (P.gamma > 0.0) {
            const NeumannReport nr = neumann_check(sub, tn);
            e["neumann_min_margin"] = nr.min_margin;
            e["neumann_max_flux_mismatch"] = nr.max_flux_mismatch;
        }
        sweep.push_back(e);
        r.out.add_check("subsolution residual nonnegative at R = " + num17(R),
                        rep.min_residual >= 0.0, rep.min_residual, 0.0, "subsolution_residual");
    }
    r.out.write_json("subsolution.json", {{"n", P.n}, {"amplitude", prof->amplitude}, {"sweep", sweep}},
                     "subsolution_residual");
    return 0;
}

int cmd_linearized(Run& r)
{
    auto grid = make_grid(r);
    const Profile prof = solve_profile(r.params2d);
    const std::string kind = r.cfg.str("linearized.data", "default");
    Fn2 data;
    if (kind == "default") {
        data = [](double x, double y) { return 1.0 + 0.25 * (1.0 - x) * (1.0 + y); };
    } else if (kind == "constant") {
        const double c = r.cfg.real("linearized.constant", 1.0);
        data = [c](double, double) { return c; };
    } else {
        throw ParameterError("linearized.data must be default or constant");
    }
    LinearizedResult res = solve_linearized(grid, prof, data);
    const double hx = grid->hx;
    fit_radial_coefficient(res, r.cfg.real("linearized.r_min", 4.0 * hx),
                           r.cfg.real("linearized.r_max", 32.0 * hx));
    std::ostringstream fs;
    write_field(fs, res.w);
    r.out.write("linearized.txt", fs.str(), "solve_linearized");
    json j = {{"floored_faces", res.floored_faces},
              {"interior_residual", res.interior_residual},
              {"b", res.b},
              {"fit_c", res.fit_c},
              {"fit_theta", res.fit_theta}};
    if (r.cfg.flag("linearized.refine", false)) {
        const RefinementCheck rc = linearized_refinement(prof, data, grid->nx, 2 * grid->nx);
        j["refinement"] = {{"b_coarse", rc.b_coarse},
                           {"b_fine", rc.b_fine},
                           {"noise", rc.noise},
                           {"pass", rc.pass}};
        r.out.add_check("|b| below 10x noise floor", rc.pass, std::abs(rc.b_fine), 10.0 * rc.noise,
                        "linearized_refinement");
    }
    r.out.write_json("linearized.json", j, "solve_linearized");
    r.out.add_check("interior residual", res.interior_residual <= 1e-8, res.interior_residual, 1e-8,
                    "solve_linearized");
    return 0;
}

int cmd_verify(Run& r)
{
    AcceptanceOptions o;
    o.grid_n = r.cfg.integer("verify.grid_n", o.grid_n);
    o.linearized_coarse = r.cfg.integer("verify.linearized_coarse", o.linearized_coarse);
    o.linearized_fine = r.cfg.integer("verify.linearized_fine", o.linearized_fine);
    for (double c : r.cfg.reals("verify.only", {}))
        o.only.push_back(static_cast<int>(c));
    r.grid = {{"grid_n", o.grid_n}};
    const auto results = run_acceptance(o, [](const CriterionSummary& c) {
        print_summary(std::cout, c);
        std::cout.flush();
    });
    json j = json::array();
    for (const CriterionSummary& c : results) {
        json lines = json::array();
        for (const CheckLine& l : c.lines)
            lines.push_back({{"label", l.label},
                             {"pass", l.pass},
                             {"supplementary", l.supplementary},
                             {"measured", l.measured},
                             {"tolerance", l.tolerance},
                             {"detail", l.detail}});
        j.push_back({{"criterion", c.criterion},
                     {"title", c.title},
                     {"pass", c.pass},
                     {"runtime_budget", c.runtime_budget},
                     {"lines", lines}});
        for (const CheckLine& l : c.lines)
            if (!l.supplementary)
                r.out.add_check(std::to_string(c.criterion) + ": " + l.label, l.pass, l.measured,
                                l.tolerance, "run_acceptance");
    }
    r.out.write_json("verify.json", j, "run_acceptance");
    int passed = 0;
    for (const CriterionSummary& c : results)
        passed += c.pass;
    std::cout << passed << " of " << results.size() << " criteria passed\n";
    return all_passed(results) ? 0 : 3;
}

const std::map<std::string, int (*)(Run&)>& table()
{
    static const std::map<std::string, int (*)(Run&)> t = {
        {"constants", cmd_constants},   {"profile", cmd_profile},
        {"extend", cmd_extend},         {"minimize", cmd_minimize},
        {"weiss", cmd_weiss},           {"monneau", cmd_monneau},
        {"blowup", cmd_blowup},         {"density", cmd_density},
        {"domvar", cmd_domvar},         {"subsolution-check", cmd_subsolution},
        {"linearized", cmd_linearized}, {"verify-all", cmd_verify},
    };
    return t;
}

} // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names = {
        "constants", "profile", "extend",  "minimize",          "weiss",      "monneau",
        "blowup",    "density", "domvar",  "subsolution-check", "linearized", "verify-all"};
    return names;
}

int run_command(const Invocation& inv)
{
    const auto it = table().find(inv.command);
    if (it == table().end())
        throw ParameterError("unknown command '" + inv.command + "'");
    Run r(inv);
    const int status = it->second(r);
    r.finish();
    return status;
}

} // namespace fbnl::cli
