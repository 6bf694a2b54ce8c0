#include "slabgreen/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/version.hpp>
#include <gsl/gsl_version.h>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "slabgreen/angular_kernels.hpp"
#include "slabgreen/bg_inequality.hpp"
#include "slabgreen/biot_savart.hpp"
#include "slabgreen/errors.hpp"
#include "slabgreen/estimate_verifier.hpp"
#include "slabgreen/fields.hpp"
#include "slabgreen/ns_solver.hpp"
#include "slabgreen/slab_green.hpp"

namespace slabgreen::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// JSON config files. Nested objects address subcommands; a manifest is accepted as a config file
// through its "config" member, so a run can be repeated from its manifest.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw CLI::ConversionError("config", e.what());
        }
        if (j.is_object() && j.contains("subcommand") && j.contains("config")) j = j["config"];
        if (!j.is_object()) throw CLI::ConversionError("config", "top level must be an object");
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void collect(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, v] : obj.items()) {
            if (v.is_object()) {
                auto p = parents;
                p.push_back(key);
                collect(v, p, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (v.is_array())
                for (const auto& e : v) item.inputs.push_back(scalar(e));
            else if (!v.is_null())
                item.inputs.push_back(scalar(v));
            items.push_back(std::move(item));
        }
    }
};

json versions() {
    json v;
    v["slabgreen"] = version();
    v["boost"] = BOOST_LIB_VERSION;
    v["gsl"] = GSL_VERSION;
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    v["cli11"] = CLI11_VERSION;
    v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    return v;
}

// Option values as given (flags > config > defaults), keyed by long name.
json echo_options(const CLI::App* sub) {
    json o = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt == sub->get_help_ptr() || opt->get_single_name() == "config") continue;
        const std::string name = opt->get_single_name();
        if (opt->get_type_size_max() == 0) {
            o[name] = opt->count() > 0 && opt->as<bool>();
            continue;
        }
        const auto& res = opt->results();
        if (res.empty()) {
            if (!opt->get_default_str().empty()) o[name] = opt->get_default_str();
        } else if (res.size() == 1 && opt->get_expected_max() <= 1) {
            o[name] = res.front();
        } else {
            o[name] = res;
        }
    }
    return o;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + path.string());
    f << text;
    if (!f) throw InvalidArgument("write failed: " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

// Output locations of one run. Every file lands inside `dir`.
struct RunContext {
    fs::path dir;
    json outputs = json::array();

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return dir / name;
    }

    // Relative paths resolve inside the output directory; absolute paths must already point there.
    fs::path resolve(const std::string& name) {
        fs::path p(name);
        if (p.is_absolute()) {
            const fs::path rel = p.lexically_normal().lexically_relative(fs::absolute(dir).lexically_normal());
            if (rel.empty() || *rel.begin() == "..")
                throw InvalidArgument("output path " + name + " lies outside the output directory " + dir.string());
            p = rel;
        }
        p = p.lexically_normal();
        if (!p.empty() && *p.begin() == "..") throw InvalidArgument("output path " + name + " escapes the output directory");
        outputs.push_back(p.generic_string());
        fs::create_directories((dir / p).parent_path());
        return dir / p;
    }

    void manifest(const std::string& stem, const std::string& subcommand, const json& config,
                  std::optional<std::uint64_t> seed, const json& summary) {
        json m;
        m["subcommand"] = subcommand;
        m["config"] = json::object({{subcommand, config}});
        m["seed"] = seed ? json(*seed) : json(nullptr);
        m["versions"] = versions();
        outputs.push_back(stem + ".manifest.json");
        m["outputs"] = outputs;
        m["summary"] = summary;
        write_text(dir / (stem + ".manifest.json"), dump(m));
    }
};

json row(const std::string& key, const std::string& quantity, double value, const std::string& status = "") {
    json r;
    r["key"] = key;
    r["quantity"] = quantity;
    r["value"] = value;
    r["status"] = status;
    return r;
}

json pair_list(const std::vector<std::pair<double, double>>& v) {
    json a = json::array();
    for (const auto& [x, y] : v) a.push_back(json::array({x, y}));
    return a;
}

std::string pair_csv(const std::string& header, const std::vector<std::pair<double, double>>& v) {
    std::string s = header + "\n";
    for (const auto& [x, y] : v) s += fmt(x) + "," + fmt(y) + "\n";
    return s;
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
    std::vector<double> x, y;
    double tol = 1e-10;
    bool grad = false;
    std::string method = "auto";
};

void cmd_kernel(const KernelArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    if (a.x.size() != 3 || a.y.size() != 3) throw CLI::ValidationError("--x/--y", "expected three comma-separated coordinates");
    const SlabPoint x{a.x[0], a.x[1], a.x[2]}, y{a.y[0], a.y[1], a.y[2]};
    TruncationPolicy pol;
    pol.target_abs_error = a.tol;
    const GreenMethod m = a.method == "images" ? GreenMethod::Images
                          : a.method == "modal" ? GreenMethod::Modal
                                                : GreenMethod::Auto;
    json j;
    j["x"] = a.x;
    j["y"] = a.y;
    const KernelResult k = eval_G(x, y, pol, m);
    j["value"] = k.value;
    j["error_bound"] = k.error_bound;
    j["terms"] = k.terms_used;
    json summary = json::array({row("kernel", "G(x,y)", k.value)});
    if (a.grad) {
        const GradientResult g = eval_gradG(x, y, pol, m);
        j["gradient"] = json::object({{"dx1", g.value[0]},
                                      {"dx2", g.value[1]},
                                      {"dy1", g.value[2]},
                                      {"dy2", g.value[3]},
                                      {"dy3", g.value[4]}});
        j["gradient_error_bound"] = g.error_bound;
        j["gradient_terms"] = g.terms_used;
    }
    write_text(ctx.file("kernel.json"), dump(j));
    ctx.manifest("kernel", "kernel", config, std::nullopt, summary);
    out << dump(j);
}

// ---------------------------------------------------------------- angular

struct AngularArgs {
    double r = 1.0, z = 0.5, rho = 1.0, l = 0.5;
    std::string which = "absG";
    double tol = 1e-10;
};

void cmd_angular(const AngularArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    const AxiPair p{a.r, a.z, a.rho, a.l};
    json j;
    j["r"] = a.r;
    j["z"] = a.z;
    j["rho"] = a.rho;
    j["l"] = a.l;
    j["which"] = a.which;
    json summary;
    if (a.which == "absGradG") {
        const RadialPair v = angular_abs_gradG(p, a.tol);
        j["d_rho"] = v.d_rho;
        j["d_r"] = v.d_r;
        summary = json::array({row("angular", "int |dG/drho| dphi", v.d_rho), row("angular", "int |dG/dr| dphi", v.d_r)});
    } else {
        double v = 0.0;
        if (a.which == "absG") v = angular_abs_G(p, a.tol);
        else if (a.which == "cosG") v = angular_cos_G(p, a.tol);
        else v = angular_cos_gradG(p, a.tol);
        j["value"] = v;
        summary = json::array({row("angular", a.which, v)});
    }
    write_text(ctx.file("angular.json"), dump(j));
    ctx.manifest("angular", "angular", config, std::nullopt, summary);
    out << dump(j);
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string bound;
    int n = 1000;
    std::uint64_t seed = 7;
    std::string sweep;
    std::vector<double> grid;
    int n_per_point = 100;
};

std::vector<double> default_sweep_grid(BoundId id, const std::string& axis) {
    const bool near = id == BoundId::A1_near || id == BoundId::A2_near || id == BoundId::L33_absG_near ||
                      id == BoundId::L33_gradG_near;
    if (axis == "d") return near ? std::vector<double>{1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3}
                                 : std::vector<double>{2, 4, 8, 16, 32, 64, 128};
    if (axis == "dist") return {1e-3, 1e-2, 0.1, 1.0};
    if (axis == "r") return {5, 10, 20, 40, 80};
    return near ? std::vector<double>{1e-4, 1e-3, 1e-2, 0.1, 0.5} : std::vector<double>{1, 2, 4, 8, 16};
}

json report_json(const BoundReport& r) {
    const BoundSpec s = bound_spec(r.id);
    json j;
    j["bound"] = to_string(r.id);
    j["lhs"] = s.lhs;
    j["rhs"] = s.rhs;
    j["regime"] = s.regime;
    j["asymptotic_variable"] = s.asymptotic_variable;
    j["seed"] = r.seed;
    j["n_samples"] = r.n_samples;
    j["discarded"] = r.discarded;
    j["empirical_constant"] = r.empirical_constant;
    json am;
    for (int k = 0; k < 4; ++k)
        if (!s.coordinate_names[k].empty()) am[s.coordinate_names[k]] = r.argmax.coords[k];
    am["lhs"] = r.argmax.lhs;
    am["rhs"] = r.argmax.rhs;
    am["ratio"] = r.argmax.ratio;
    j["argmax"] = am;
    j["trend_slope"] = r.trend_slope;
    j["binned_maxima"] = pair_list(r.binned_maxima);
    return j;
}

void cmd_verify(const VerifyArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    const BoundId id = bound_from_string(a.bound);
    const std::string stem = "verify_" + to_string(id);
    const BoundReport rep = verify_bound(id, a.n, a.seed);
    json j = report_json(rep);
    write_text(ctx.file(stem + "_bins.csv"), pair_csv("mean_log_variable,max_ratio", rep.binned_maxima));
    json summary = json::array({row(to_string(id), "empirical constant", rep.empirical_constant),
                                row(to_string(id), "trend slope", rep.trend_slope)});
    if (!a.sweep.empty()) {
        const std::vector<double> grid = a.grid.empty() ? default_sweep_grid(id, a.sweep) : a.grid;
        const auto pts = regime_sweep(id, a.sweep, grid, a.n_per_point, a.seed);
        std::vector<std::pair<double, double>> curve;
        for (const SweepPoint& p : pts) curve.emplace_back(p.value, p.max_ratio);
        j["sweep"] = json::object({{"axis", a.sweep}, {"n_per_point", a.n_per_point}, {"points", pair_list(curve)}});
        write_text(ctx.file(stem + "_sweep_" + a.sweep + ".csv"), pair_csv(a.sweep + ",max_ratio", curve));
    }
    write_text(ctx.file(stem + ".json"), dump(j));
    ctx.manifest(stem, "verify", config, a.seed, summary);
    out << dump(j);
}

// ---------------------------------------------------------------- biot-savart

struct BiotSavartArgs {
    std::string field;
    std::string component = "ut";
    double r0 = 20.0;
    std::string targets;
    double tol = 1e-10;
};

std::vector<std::pair<double, double>> read_targets(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot open targets file " + path);
    std::vector<std::pair<double, double>> t;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream s(line);
        double r, z;
        if (!(s >> r >> z)) {
            if (t.empty() && lineno == 1) continue;  // header
            throw InvalidArgument("targets file " + path + ": malformed line " + std::to_string(lineno));
        }
        t.emplace_back(r, z);
    }
    if (t.empty()) throw InvalidArgument("targets file " + path + " has no targets");
    return t;
}

double bilinear(const AxiScalarField& f, double r, double z) {
    const AxiGrid& g = f.grid;
    const double x = std::clamp(r / g.hr(), 0.0, double(g.n_r));
    const double y = std::clamp((z - g.z0()) / g.hz(), 0.0, double(g.nz_nodes() - 1));
    const int i = std::min(int(x), g.n_r - 1), jj = std::min(int(y), g.nz_nodes() - 2);
    const double s = x - i, t = y - jj;
    return (1 - s) * (1 - t) * f(i, jj) + s * (1 - t) * f(i + 1, jj) + (1 - s) * t * f(i, jj + 1) + s * t * f(i + 1, jj + 1);
}

void cmd_biot_savart(const BiotSavartArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    const FieldBundle b = load_fields(a.field);
    const AxiScalarField& u = b.at(a.component);
    const CutoffProfile psi = make_annulus_cutoff(a.r0);
    const auto targets = read_targets(a.targets);
    const SwirlReconstructor rec(swirl_source(u), u, psi, a.tol);
    std::string csv = "r,z,reconstructed,reference,abs_error,i1,i2,i3\n";
    double max_err = 0.0, err2 = 0.0, ref2 = 0.0;
    for (const auto& [r, z] : targets) {
        const ReconstructionTerms t = rec.at(r, z);
        const double ref = bilinear(u, r, z), e = std::abs(t.value() - ref);
        max_err = std::max(max_err, e);
        err2 += e * e;
        ref2 += ref * ref;
        csv += fmt(r) + "," + fmt(z) + "," + fmt(t.value()) + "," + fmt(ref) + "," + fmt(e) + "," + fmt(t.i1) + "," +
               fmt(t.i2) + "," + fmt(t.i3) + "\n";
    }
    const double rel = ref2 > 0.0 ? std::sqrt(err2 / ref2) : std::sqrt(err2);
    write_text(ctx.file("biot_savart.csv"), csv);
    json j;
    j["field"] = a.field;
    j["component"] = a.component;
    j["r0"] = a.r0;
    j["targets"] = targets.size();
    j["max_abs_error"] = max_err;
    j["relative_l2_error"] = rel;
    ctx.manifest("biot_savart", "biot-savart", config, std::nullopt,
                 json::array({row("biot-savart", "relative L2 reconstruction error", rel)}));
    out << dump(j);
}

// ---------------------------------------------------------------- bg-sweep

struct BgArgs {
    std::vector<double> lambdas{4, 16, 64, 256};
    std::string family = "trace";
    bool negative_control = false;
};

void cmd_bg_sweep(const BgArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    const BgFamily fam = bg_family_from_string(a.family);
    const BgSweepReport rep = bg_sweep(fam, a.lambdas, a.negative_control);
    std::string csv = "lambda,function,ratio,amplitude\n";
    json per = json::array();
    for (const BgLambdaResult& l : rep.per_lambda) {
        for (const BgMemberResult& m : l.members)
            csv += fmt(l.lambda) + "," + m.label + "," + fmt(m.ratio) + "," + fmt(m.amplitude) + "\n";
        per.push_back(json::object({{"lambda", l.lambda},
                                    {"max_ratio", l.max_ratio},
                                    {"argmax", l.argmax},
                                    {"excluded", l.excluded}}));
    }
    const std::string stem = std::string("bg_sweep_") + to_string(fam) + (a.negative_control ? "_control" : "");
    write_text(ctx.file(stem + ".csv"), csv);
    json j;
    j["family"] = to_string(fam);
    j["negative_control"] = a.negative_control;
    j["per_lambda"] = per;
    j["max_over_min"] = rep.max_over_min;
    j["growth_exponent"] = rep.growth_exponent;
    write_text(ctx.file(stem + ".json"), dump(j));
    const std::string key = "BG " + to_string(fam) + (a.negative_control ? " control" : "");
    ctx.manifest(stem, "bg-sweep", config, std::nullopt,
                 json::array({row(key, "max/min ratio over lambda", rep.max_over_min),
                              row(key, "growth exponent in lambda", rep.growth_exponent)}));
    out << dump(j);
}

// ---------------------------------------------------------------- solve / diagnose

struct SolveArgs {
    std::string mode = "slab";
    double eps = 1e-2;
    double rmax = 64.0;
    int nr = 1024;
    int nz = 64;
    double tol = 1e-8;
    double dtau = 1e4;
    double forcing_radius = 0.0;
    int max_iter = 200;
    std::string out = "solution.sgf";
    std::string format = "binary";
};

json solver_config_json(const SolverConfig& c) {
    json j;
    j["mode"] = c.periodic ? "periodic" : "slab";
    j["r_max"] = c.r_max;
    j["n_r"] = c.n_r;
    j["n_z"] = c.n_z;
    j["eps"] = c.eps;
    j["forcing_radius"] = c.support();
    j["dtau"] = c.dtau;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
    return j;
}

void cmd_solve(const SolveArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    SolverConfig c;
    c.periodic = a.mode == "periodic";
    c.eps = a.eps;
    c.r_max = a.rmax;
    c.n_r = a.nr;
    c.n_z = a.nz;
    c.tol = a.tol;
    c.dtau = a.dtau;
    c.forcing_radius = a.forcing_radius;
    c.max_iter = a.max_iter;
    c.validate();
    const fs::path path = ctx.resolve(a.out);
    const fs::path side_path = ctx.resolve(a.out + ".solver.json");
    const SolveResult s = solve_steady(c);
    FieldBundle b;
    b.grid = c.grid();
    b.components = {{"ur", s.u.ur}, {"ut", s.u.ut}, {"uz", s.u.uz}, {"p", s.p}};
    save_fields(path.string(), b, a.format == "csv" ? FieldFormat::Csv : FieldFormat::Binary);
    json side;
    side["config"] = solver_config_json(c);
    side["iterations"] = s.iterations;
    side["residual"] = s.residual;
    write_text(side_path, dump(side));
    ctx.manifest("solve", "solve", config, std::nullopt,
                 json::array({row("solve", "steady residual", s.residual), row("solve", "iterations", s.iterations)}));
    out << dump(side);
}

struct DiagnoseArgs {
    std::string in;
    std::optional<double> eps, tol, forcing_radius;
};

json fit_json(const DecayFit& f, bool ok) {
    return json::object({{"alpha", f.alpha},
                         {"beta", f.beta},
                         {"r1", f.r1},
                         {"r2", f.r2},
                         {"rms", f.rms},
                         {"points", f.points},
                         {"ok", ok}});
}

void cmd_diagnose(const DiagnoseArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    const FieldBundle b = load_fields(a.in);
    SolverConfig c;
    c.periodic = b.grid.periodic;
    c.r_max = b.grid.r_max;
    c.n_r = b.grid.n_r;
    c.n_z = b.grid.n_z;
    const std::string side_path = a.in + ".solver.json";
    if (fs::exists(side_path)) {
        std::ifstream f(side_path);
        json side;
        try {
            side = json::parse(f);
            const json& sc = side.at("config");
            c.eps = sc.at("eps").get<double>();
            c.forcing_radius = sc.at("forcing_radius").get<double>();
            c.dtau = sc.value("dtau", c.dtau);
            c.beta = sc.value("beta", c.beta);
            c.gamma = sc.value("gamma", c.gamma);
            c.tol = sc.at("tol").get<double>();
        } catch (const json::exception& e) {
            throw ManifestUnreadable(side_path + ": " + e.what());
        }
    }
    if (a.eps) c.eps = *a.eps;
    if (a.tol) c.tol = *a.tol;
    if (a.forcing_radius) c.forcing_radius = *a.forcing_radius;
    AxiVectorField u(b.grid);
    u.ur = b.at("ur");
    u.ut = b.at("ut");
    u.uz = b.at("uz");
    const Diagnostics d = run_diagnostics(u, b.at("p"), c);

    json j;
    j["input"] = a.in;
    j["solver"] = solver_config_json(c);
    j["dirichlet_energy"] = d.dirichlet_energy;
    j["annulus_energy"] = pair_list(d.annulus_energy);
    j["gamma_interior_max"] = d.gamma_interior_max;
    j["gamma_boundary_max"] = d.gamma_boundary_max;
    j["gamma_max_principle_residual"] = d.gamma_max_principle_residual;
    j["p1"] = d.p1;
    j["head_pressure_max"] = d.head_pressure_max;
    j["head_pressure_min"] = d.head_pressure_min;
    j["head_equation_residual"] = d.head_equation_residual;
    j["pressure_oscillation"] = pair_list(d.pressure_oscillation);
    j["max_dz_p"] = d.max_dz_p;
    j["poincare_ur_l2"] = d.poincare_ur_l2;
    j["poincare_dz_ur_l2"] = d.poincare_dz_ur_l2;
    j["poincare_ratio"] = d.poincare_ratio;
    j["momentum_residual"] = d.momentum_residual;
    j["continuity_residual"] = d.continuity_residual;
    j["divergence_max"] = d.divergence_max;
    if (d.has_boundary_identities)
        j["boundary_identities"] = json::object({{"max_dz_wr_wall", d.boundary.max_dz_wr_wall},
                                                 {"max_wz_wall", d.boundary.max_wz_wall},
                                                 {"max_wr_column_integral", d.boundary.max_wr_column_integral}});
    j["decay_fits"] = json::object({{"utheta", fit_json(d.decay_utheta, d.decay_utheta_ok)},
                                    {"wr_wz", fit_json(d.decay_wrz, d.decay_wrz_ok)},
                                    {"j_omega", fit_json(d.decay_jomega, d.decay_jomega_ok)}});
    write_text(ctx.file("diagnose.json"), dump(j));
    write_text(ctx.file("annulus_energy.csv"), pair_csv("R,energy", d.annulus_energy));
    write_text(ctx.file("pressure_oscillation.csv"), pair_csv("R,oscillation", d.pressure_oscillation));
    json summary = json::array({row("diagnose", "Gamma maximum-principle residual", d.gamma_max_principle_residual),
                                row("diagnose", "head pressure max", d.head_pressure_max),
                                row("diagnose", "Dirichlet energy", d.dirichlet_energy)});
    if (d.decay_utheta_ok) summary.push_back(row("decay u^theta", "alpha", d.decay_utheta.alpha));
    if (d.decay_wrz_ok) summary.push_back(row("decay (w^r, w^z)", "alpha", d.decay_wrz.alpha));
    if (d.decay_jomega_ok) summary.push_back(row("decay J Omega", "alpha", d.decay_jomega.alpha));
    ctx.manifest("diagnose", "diagnose", config, std::nullopt, summary);
    out << dump(j);
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::vector<std::string> manifests;
};

void cmd_report(const ReportArgs& a, RunContext& ctx, const json& config, std::ostream& out) {
    if (a.manifests.empty()) throw ManifestUnreadable("no manifests given");
    struct Row {
        std::string source, key, quantity, value, status;
    };
    std::vector<Row> rows;
    for (const std::string& path : a.manifests) {
        std::ifstream f(path);
        if (!f) throw ManifestUnreadable("cannot open " + path);
        json m;
        try {
            m = json::parse(f);
            const std::string sub = m.at("subcommand").get<std::string>();
            for (const json& r : m.at("summary")) {
                const json& v = r.at("value");
                rows.push_back({sub, r.at("key").get<std::string>(), r.at("quantity").get<std::string>(),
                                v.is_number() ? fmt(v.get<double>()) : v.dump(), r.value("status", "")});
            }
        } catch (const json::exception& e) {
            throw ManifestUnreadable(path + ": " + e.what());
        }
    }
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    };
    std::string csv = "source,key,quantity,value,status\n";
    for (const Row& r : rows)
        csv += quote(r.source) + "," + quote(r.key) + "," + quote(r.quantity) + "," + r.value + "," + r.status + "\n";
    std::size_t w[5] = {6, 3, 8, 5, 6};
    for (const Row& r : rows) {
        w[0] = std::max(w[0], r.source.size());
        w[1] = std::max(w[1], r.key.size());
        w[2] = std::max(w[2], r.quantity.size());
        w[3] = std::max(w[3], r.value.size());
        w[4] = std::max(w[4], r.status.size());
    }
    std::ostringstream txt;
    auto line = [&](const std::string& a0, const std::string& a1, const std::string& a2, const std::string& a3,
                    const std::string& a4) {
        txt << std::left << std::setw(int(w[0])) << a0 << "  " << std::setw(int(w[1])) << a1 << "  "
            << std::setw(int(w[2])) << a2 << "  " << std::right << std::setw(int(w[3])) << a3 << "  " << a4 << "\n";
    };
    line("source", "key", "quantity", "value", "status");
    for (const Row& r : rows) line(r.source, r.key, r.quantity, r.value, r.status);
    write_text(ctx.file("report.csv"), csv);
    write_text(ctx.file("report.txt"), txt.str());
    ctx.manifest("report", "report", config, std::nullopt, json::array());
    out << txt.str();
}

std::string synopsis() {
    return "usage: slabgreen [--out-dir DIR] [--config FILE] <subcommand> [options]\n"
           "subcommands: kernel, angular, verify, biot-savart, bg-sweep, solve, diagnose, report\n"
           "run 'slabgreen <subcommand> --help' for the options of one subcommand\n";
}

}  // namespace

std::string version() { return "1.0.0"; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Slab Green's function kernels, estimate checks and axisymmetric Navier-Stokes runs", "slabgreen"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON configuration file (or a manifest of an earlier run)");
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_dir;
    app.add_option("--out-dir", out_dir, "Output directory (default: $SLABGREEN_OUT or .)");

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "Slab Green's function G(x, y) and its gradient");
    kernel->add_option("--x", ka.x, "Target x1,x2,x3")->delimiter(',')->required();
    kernel->add_option("--y", ka.y, "Source y1,y2,y3")->delimiter(',')->required();
    kernel->add_option("--tol", ka.tol, "Absolute truncation target")->capture_default_str();
    kernel->add_flag("--grad", ka.grad, "Also evaluate the gradient");
    kernel->add_option("--method", ka.method, "Series")->check(CLI::IsMember({"auto", "images", "modal"}))->capture_default_str();

    AngularArgs aa;
    auto* angular = app.add_subcommand("angular", "Angular integrals of the slab kernel");
    angular->add_option("--r", aa.r)->required();
    angular->add_option("--z", aa.z)->required();
    angular->add_option("--rho", aa.rho)->required();
    angular->add_option("--l", aa.l)->required();
    angular->add_option("--which", aa.which)
        ->check(CLI::IsMember({"absG", "absGradG", "cosG", "cosGradG"}))
        ->capture_default_str();
    angular->add_option("--tol", aa.tol)->capture_default_str();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Empirical constant of one kernel bound");
    std::vector<std::string> bound_names;
    for (BoundId id : all_bounds()) bound_names.push_back(to_string(id));
    verify->add_option("--bound", va.bound)->check(CLI::IsMember(bound_names))->required();
    verify->add_option("--n", va.n, "Number of quasi-random samples")->check(CLI::Range(100, 100000000))->capture_default_str();
    verify->add_option("--seed", va.seed)->capture_default_str();
    verify->add_option("--sweep", va.sweep, "Sweep axis: d, dist, gap or r");
    verify->add_option("--grid", va.grid, "Sweep values")->delimiter(',');
    verify->add_option("--n-per-point", va.n_per_point)->check(CLI::PositiveNumber)->capture_default_str();

    BiotSavartArgs ba;
    auto* biot = app.add_subcommand("biot-savart", "Reconstruct a swirl field from its cutoff Green representation");
    biot->add_option("--field", ba.field, "Fields file")->required();
    biot->add_option("--component", ba.component)->capture_default_str();
    biot->add_option("--r0", ba.r0, "Annulus radius")->required();
    biot->add_option("--targets", ba.targets, "CSV of r,z targets")->required();
    biot->add_option("--tol", ba.tol)->capture_default_str();

    BgArgs ga;
    auto* bg = app.add_subcommand("bg-sweep", "Thin-domain Brezis-Gallouet ratio sweep");
    bg->add_option("--lambdas", ga.lambdas)->delimiter(',')->capture_default_str();
    bg->add_option("--family", ga.family)->check(CLI::IsMember({"trace", "mean"}))->capture_default_str();
    bg->add_flag("--negative-control", ga.negative_control, "Use z-independent profiles");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Steady forced axisymmetric Navier-Stokes solve");
    solve->add_option("--mode", sa.mode)->check(CLI::IsMember({"slab", "periodic"}))->capture_default_str();
    solve->add_option("--eps", sa.eps)->capture_default_str();
    solve->add_option("--rmax", sa.rmax)->capture_default_str();
    solve->add_option("--nr", sa.nr)->capture_default_str();
    solve->add_option("--nz", sa.nz)->capture_default_str();
    solve->add_option("--tol", sa.tol)->capture_default_str();
    solve->add_option("--dtau", sa.dtau)->capture_default_str();
    solve->add_option("--forcing-radius", sa.forcing_radius, "0 selects r_max/16")->capture_default_str();
    solve->add_option("--max-iter", sa.max_iter)->capture_default_str();
    solve->add_option("--out", sa.out, "Fields file inside the output directory")->capture_default_str();
    solve->add_option("--format", sa.format)->check(CLI::IsMember({"binary", "csv"}))->capture_default_str();

    DiagnoseArgs da;
    auto* diagnose = app.add_subcommand("diagnose", "Diagnostics of a solved field");
    diagnose->add_option("--in", da.in, "Fields file written by solve")->required();
    diagnose->add_option("--eps", da.eps, "Override the forcing amplitude of the sidecar");
    diagnose->add_option("--tol", da.tol, "Override the solver tolerance of the sidecar");
    diagnose->add_option("--forcing-radius", da.forcing_radius);

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "Summary table over manifests");
    report->add_option("--manifests,manifests", ra.manifests, "Manifest files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << "\n" << synopsis();
        return kExitUsage;
    }

    try {
        RunContext ctx;
        if (out_dir.empty()) {
            const char* env = std::getenv("SLABGREEN_OUT");
            out_dir = env && *env ? env : ".";
        }
        ctx.dir = out_dir;
        fs::create_directories(ctx.dir);
        const CLI::App* sub = app.get_subcommands().front();
        const json config = echo_options(sub);
        if (sub == kernel) cmd_kernel(ka, ctx, config, out);
        else if (sub == angular) cmd_angular(aa, ctx, config, out);
        else if (sub == verify) cmd_verify(va, ctx, config, out);
        else if (sub == biot) cmd_biot_savart(ba, ctx, config, out);
        else if (sub == bg) cmd_bg_sweep(ga, ctx, config, out);
        else if (sub == solve) cmd_solve(sa, ctx, config, out);
        else if (sub == diagnose) cmd_diagnose(da, ctx, config, out);
        else cmd_report(ra, ctx, config, out);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << synopsis();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitOk;
}

}  // namespace slabgreen::cli
