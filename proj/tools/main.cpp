// vblwave: periodic traveling waves of scalar viscous balance laws --
// construction, spectral certification, and nonlinear instability runs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vbl/errors.hpp"
#include "vbl/evolution.hpp"
#include "vbl/io.hpp"
#include "vbl/model.hpp"
#include "vbl/profile.hpp"
#include "vbl/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

// exit codes: 0 ok, 1 parse error, 2 hypothesis fails, 3 undetermined,
// 4 solver failure, 5 not unstable, 6 growth window too short
enum ExitCode {
    kOk = 0,
    kParse = 1,
    kHypothesisFails = 2,
    kUndetermined = 3,
    kSolverFailure = 4,
    kNotUnstable = 5,
    kWindowTooShort = 6,
};

vbl::Model load_model(const std::string& ref) {
    for (const std::string& name : vbl::Model::builtin_names())
        if (name == ref) return vbl::Model::builtin(ref);
    return vbl::Model::from_json(vbl::read_file(ref));
}

json manifest_base(const std::string& command, const std::string& model_ref) {
    json m;
    m["command"] = command;
    m["model"] = model_ref;
    m["version"] = kVersion;
    const char* threads = std::getenv("VBL_THREADS");
    m["threads"] = threads ? std::atoi(threads) : 1;
    m["outputs"] = json::object();
    return m;
}

void add_output(json& manifest, const std::string& path) {
    manifest["outputs"][fs::path(path).filename().string()] = vbl::file_hash(path);
}

void write_manifest(json& manifest, const fs::path& dir) {
    vbl::write_file((dir / "manifest.json").string(), manifest.dump(2));
}

int cmd_check(const std::string& model_ref) {
    vbl::Model model = load_model(model_ref);
    vbl::HypothesisReport rep = model.check_hypotheses();
    std::cout << rep.to_json() << "\n";
    if (rep.any_fails()) return kHypothesisFails;
    if (!rep.all_hold()) return kUndetermined;
    return kOk;
}

int cmd_wave(const std::string& model_ref, const std::string& family, double epsilon,
             const std::string& out_dir) {
    vbl::Model model = load_model(model_ref);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    json manifest = manifest_base("wave", model_ref);
    manifest["family"] = family;
    manifest["epsilon"] = epsilon;

    if (family == "pulse") {
        vbl::PulseSolution pulse = vbl::compute_pulse(model);
        const std::string csv = (dir / "pulse.csv").string();
        const std::string meta = (dir / "pulse.json").string();
        vbl::save_pulse(pulse, csv, meta);
        add_output(manifest, csv);
        add_output(manifest, meta);
        write_manifest(manifest, dir);
        std::cout << "c1 = " << pulse.c1 << "  kappa = " << pulse.kappa
                  << "  half-width = " << pulse.half_width() << "\n";
        return kOk;
    }

    vbl::WaveProfile wave;
    if (family == "hopf") {
        wave = std::move(vbl::continue_hopf_family(model, {epsilon}).front());
    } else if (family == "large-period") {
        vbl::PulseSolution pulse = vbl::compute_pulse(model);
        wave = std::move(vbl::continue_large_period_family(model, pulse, {epsilon}).waves.front());
    } else {
        std::cerr << "unknown family '" << family << "' (hopf | large-period | pulse)\n";
        return kParse;
    }
    const std::string csv = (dir / "wave.csv").string();
    const std::string meta = (dir / "wave.json").string();
    vbl::save_wave(wave, csv, meta);
    add_output(manifest, csv);
    add_output(manifest, meta);
    write_manifest(manifest, dir);
    std::cout << "L = " << wave.L << "  c = " << wave.c << "  amplitude = " << wave.amplitude()
              << "  M = " << wave.grid_size() << "\n";
    return kOk;
}

int cmd_spectrum(const std::string& model_ref, const std::string& wave_file, int theta_grid,
                 const std::string& out_dir) {
    vbl::Model model = load_model(model_ref);
    vbl::WaveProfile wave = vbl::load_wave(wave_file);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    json manifest = manifest_base("spectrum", model_ref);
    manifest["wave"] = wave_file;
    manifest["theta_grid"] = theta_grid;

    const vbl::BlochCoefficients coeffs = vbl::bloch_coefficients(model, wave);
    const vbl::ThetaSweep sweep = vbl::sweep_theta(coeffs, theta_grid);
    const std::string csv = (dir / "spectrum.csv").string();
    vbl::save_sweep(sweep, csv);
    add_output(manifest, csv);

    // certification is at theta = 0, where the growth mechanism lives
    const vbl::InstabilityCertificate cert = vbl::certify_instability(model, wave, 0.0);
    json cj;
    cj["unstable"] = cert.unstable;
    cj["re_lambda"] = cert.lambda.real();
    cj["im_lambda"] = cert.lambda.imag();
    cj["theta_star"] = cert.theta_star;
    cj["residual"] = cert.residual;
    cj["margin"] = cert.margin;
    cj["note"] = cert.note;
    const std::string cert_path = (dir / "certificate.json").string();
    vbl::write_file(cert_path, cj.dump(2));
    add_output(manifest, cert_path);
    write_manifest(manifest, dir);

    std::cout << "max growth rate = " << sweep.max_growth_rate
              << " at theta = " << sweep.theta_at_max << "  certified = "
              << (cert.unstable ? "yes" : "no") << "\n";
    return cert.unstable ? kOk : kNotUnstable;
}

int cmd_evolve(const std::string& model_ref, const std::string& wave_file,
               std::vector<double> deltas, double T, const std::string& out_dir) {
    vbl::Model model = load_model(model_ref);
    vbl::WaveProfile wave = vbl::load_wave(wave_file);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    json manifest = manifest_base("evolve", model_ref);
    manifest["wave"] = wave_file;
    manifest["deltas"] = deltas;
    manifest["T"] = T;

    const vbl::InstabilityCertificate cert = vbl::certify_instability(model, wave, 0.0);
    if (!cert.unstable) {
        std::cerr << "wave not certified unstable at theta = 0: " << cert.note << "\n";
        return kNotUnstable;
    }
    const vbl::ExperimentReport rep =
        vbl::instability_experiment(model, wave, cert, deltas, T);
    for (size_t i = 0; i < deltas.size(); ++i) {
        const std::string trace_path =
            (dir / ("trace_" + std::to_string(i) + ".csv")).string();
        rep.traces[i].save(trace_path);
        add_output(manifest, trace_path);
    }
    const std::string report_path = (dir / "experiment.json").string();
    vbl::write_file(report_path, rep.to_json());
    add_output(manifest, report_path);
    write_manifest(manifest, dir);

    std::cout << "Re lambda = " << rep.re_lambda << "  rho/Re lambda = " << rep.ratio << "\n";
    return kOk;
}

// Small-amplitude wave data for the Burgers-Fisher equation at eps = 0.005:
// phase portrait samples, the wave profile, and its period/amplitude.
int cmd_reproduce_fig1(const std::string& out_dir) {
    vbl::Model model = vbl::Model::builtin("burgers-fisher");
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    json manifest = manifest_base("reproduce-fig1", "burgers-fisher");

    const double eps = 0.005;
    vbl::WaveProfile wave = std::move(vbl::continue_hopf_family(model, {eps}).front());
    const std::string wave_csv = (dir / "fig1_wave.csv").string();
    const std::string wave_meta = (dir / "fig1_wave.json").string();
    vbl::save_wave(wave, wave_csv, wave_meta);
    add_output(manifest, wave_csv);
    add_output(manifest, wave_meta);

    // nearby spiral trajectories in the (phi, phi') plane
    std::vector<double> col_t, col_phi, col_v, col_id;
    int id = 0;
    for (double phi0 : {-0.02, -0.05, -0.12}) {
        vbl::Trajectory traj =
            vbl::integrate_phase_plane(model, wave.c, {phi0, 0.0}, 0.0, 40.0);
        for (double t = 0.0; t <= 40.0; t += 0.05) {
            const vbl::State2 y = traj.eval(t);
            col_t.push_back(t);
            col_phi.push_back(y[0]);
            col_v.push_back(y[1]);
            col_id.push_back(id);
        }
        ++id;
    }
    const std::string portrait_csv = (dir / "fig1_portrait.csv").string();
    vbl::write_csv(portrait_csv, {"trajectory", "t", "phi", "dphi"},
                   {col_id, col_t, col_phi, col_v});
    add_output(manifest, portrait_csv);
    write_manifest(manifest, dir);
    std::cout << "L = " << wave.L << "  c = " << wave.c << "  amplitude = " << wave.amplitude()
              << "\n";
    return kOk;
}

// Large-period wave and homoclinic loop for the logistic Buckley-Leverett
// equation at eps = 0.025.
int cmd_reproduce_fig2(const std::string& out_dir) {
    vbl::Model model = vbl::Model::builtin("logistic-buckley-leverett");
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    json manifest = manifest_base("reproduce-fig2", "logistic-buckley-leverett");

    vbl::PulseSolution pulse = vbl::compute_pulse(model);
    const std::string pulse_csv = (dir / "fig2_pulse.csv").string();
    const std::string pulse_meta = (dir / "fig2_pulse.json").string();
    vbl::save_pulse(pulse, pulse_csv, pulse_meta);
    add_output(manifest, pulse_csv);
    add_output(manifest, pulse_meta);

    const double eps = 0.025;
    vbl::LargePeriodResult fam = vbl::continue_large_period_family(model, pulse, {eps});
    const vbl::WaveProfile& wave = fam.waves.front();
    const std::string wave_csv = (dir / "fig2_wave.csv").string();
    const std::string wave_meta = (dir / "fig2_wave.json").string();
    vbl::save_wave(wave, wave_csv, wave_meta);
    add_output(manifest, wave_csv);
    add_output(manifest, wave_meta);
    write_manifest(manifest, dir);
    std::cout << "c1 = " << pulse.c1 << "  L = " << wave.L << "  c = " << wave.c
              << "  sup distance to pulse = " << fam.sup_distance_to_pulse.front() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic traveling waves of scalar viscous balance laws"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string model_ref, wave_file, family = "hopf", out_dir = ".";
    double epsilon = 0.005, T = 40.0;
    int theta_grid = 32;
    std::vector<double> deltas{1e-6};

    auto* check = app.add_subcommand("check", "verify the structural hypotheses of a model");
    check->add_option("model", model_ref, "built-in name or model JSON file")->required();

    auto* wave = app.add_subcommand("wave", "construct a traveling wave");
    wave->add_option("model", model_ref)->required();
    wave->add_option("--family", family, "hopf | large-period | pulse");
    wave->add_option("--epsilon", epsilon, "bifurcation parameter");
    wave->add_option("--out", out_dir, "output directory");

    auto* spectrum = app.add_subcommand("spectrum", "Bloch spectrum and instability certificate");
    spectrum->add_option("model", model_ref)->required();
    spectrum->add_option("wave", wave_file, "wave JSON from the wave command")->required();
    spectrum->add_option("--theta-grid", theta_grid, "number of Bloch parameters");
    spectrum->add_option("--out", out_dir);

    auto* evolve = app.add_subcommand("evolve", "nonlinear perturbation experiments");
    evolve->add_option("model", model_ref)->required();
    evolve->add_option("wave", wave_file)->required();
    evolve->add_option("--delta", deltas, "perturbation sizes");
    evolve->add_option("--T", T, "final time");
    evolve->add_option("--out", out_dir);

    auto* fig1 = app.add_subcommand("reproduce-fig1", "small-amplitude wave dataset");
    fig1->add_option("--out", out_dir);
    auto* fig2 = app.add_subcommand("reproduce-fig2", "large-period wave dataset");
    fig2->add_option("--out", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kParse : kOk;
    }

    try {
        if (check->parsed()) return cmd_check(model_ref);
        if (wave->parsed()) return cmd_wave(model_ref, family, epsilon, out_dir);
        if (spectrum->parsed()) return cmd_spectrum(model_ref, wave_file, theta_grid, out_dir);
        if (evolve->parsed()) return cmd_evolve(model_ref, wave_file, deltas, T, out_dir);
        if (fig1->parsed()) return cmd_reproduce_fig1(out_dir);
        if (fig2->parsed()) return cmd_reproduce_fig2(out_dir);
    } catch (const vbl::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const vbl::NotUnstable& e) {
        std::cerr << e.what() << "\n";
        return kNotUnstable;
    } catch (const vbl::WindowTooShort& e) {
        std::cerr << e.what() << "\n";
        return kWindowTooShort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverFailure;
    }
    return kOk;
}
