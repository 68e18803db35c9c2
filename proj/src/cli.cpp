#include "glsync/cli.hpp"

#include "glsync/error.hpp"
#include "glsync/format.hpp"
#include "glsync/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef GLSYNC_VERSION
#define GLSYNC_VERSION "unknown"
#endif

namespace glsync {

namespace fs = std::filesystem;

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string run_dir_name(std::string_view command, const RunConfig& config) {
    std::string key(command);
    key += '\n';
    key += to_text(config);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
    return std::string(command) + "-" + hex;
}

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    int workers = 0;
    std::optional<std::string> preset;
    std::optional<std::string> grid;
    std::optional<int> case_id;
    std::optional<std::string> regime;
    std::optional<std::string> bounds;
};

/// Collects artifacts for one invocation and writes the manifest last.
class RunWriter {
public:
    RunWriter(std::string command, const RunConfig& config, const std::string& out_root)
        : command_(std::move(command)), config_(config), dir_(fs::path(out_root) / run_dir_name(command_, config)),
          start_(std::chrono::steady_clock::now()) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = dir_ / name;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
        body(os);
        os.flush();
        if (!os) throw IoError("write to '" + path.string() + "' failed");
        artifacts_.push_back(name);
    }

    void finish(std::ostream& out) {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        nlohmann::ordered_json j;
        j["command"] = command_;
        j["version"] = GLSYNC_VERSION;
        j["output_dir"] = dir_.string();
        j["config"] = to_text(config_);
        j["artifacts"] = artifacts_;
        j["wall_seconds"] = wall;
        const fs::path path = dir_ / "manifest.json";
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
        os << j.dump(2) << '\n';
        if (!os) throw IoError("write to '" + path.string() + "' failed");
        out << "wrote " << dir_.string() << '\n';
    }

private:
    std::string command_;
    RunConfig config_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> artifacts_;
};

const char* pair_name(int pair) {
    static const char* names[] = {"x1y1", "x2y2", "x3y3"};
    return names[pair - 1];
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

RunConfig resolve(const Options& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    try {
        if (o.preset) c.preset = parse_preset(*o.preset);
        if (o.grid) c.grid = parse_grid(*o.grid);
        if (o.case_id) c.case_id = *o.case_id;
        if (o.regime) c.regime = parse_regime(*o.regime);
        if (o.bounds) {
            std::string text = "[stability]\nbounds = " + *o.bounds + "\n";
            c.bounds = parse_config(text).bounds;
        }
    } catch (const InvalidInput& e) {
        throw ConfigError(0, "", e.what());
    }
    return c;
}

void cmd_simulate(const RunConfig& c, const Options& o, std::ostream& out) {
    const Trajectory traj = integrate_coupled(c.sim);
    const auto metrics = sync_metrics(traj, c.sim.transient_steps, c.convergence_eps);
    RunWriter w("simulate", c, o.out_dir);
    w.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    for (const auto& m : metrics)
        out << pair_name(m.pair) << ": convergence_time=" << opt_text(m.conv_time) << " m=" << format_double(m.m)
            << " r0=" << format_double(m.r0) << '\n';
    w.finish(out);
}

void cmd_sweep(RunConfig c, const Options& o, std::ostream& out) {
    if (!c.grid) c.grid = default_grid(c.preset);
    std::vector<SigmaVec> sigmas;
    try {
        sigmas = sigma_grid(c.preset, c.grid->start, c.grid->stop, c.grid->step);
    } catch (const InvalidInput& e) {
        throw ConfigError(0, "grid", e.what());
    }
    const SweepResult result = sweep_sigma(c.sim, sigmas, c.convergence_eps, o.workers);
    RunWriter w("sweep", c, o.out_dir);
    w.write("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, result); });
    for (const auto& p : result.points) {
        out << "sigma=(" << format_double(p.sigma[0]) << ',' << format_double(p.sigma[1]) << ','
            << format_double(p.sigma[2]) << ')';
        if (p.diverged) {
            out << " diverged: " << p.note << '\n';
            continue;
        }
        for (const auto& m : p.metrics) out << ' ' << pair_name(m.pair) << ".m=" << format_double(m.m);
        out << '\n';
    }
    w.finish(out);
}

void cmd_stability(const RunConfig& c, const Options& o, std::ostream& out) {
    const StabilityReport r = stability_report(c.sim, c.bounds);
    RunWriter w("stability", c, o.out_dir);
    w.write("stability.json", [&](std::ostream& os) { os << to_json(r); });
    out << "bounds M=" << format_double(r.bounds.M) << " N=" << format_double(r.bounds.N)
        << " P=" << format_double(r.bounds.P) << (r.bounds_simulated ? " (simulated)" : " (override)") << '\n';
    for (std::size_t i = 0; i < 3; ++i)
        out << "condition " << i + 1 << ": symbolic margin=" << format_double(r.symbolic[i].margin)
            << " k-poly margin=" << format_double(r.k_poly[i].margin) << '\n';
    out << "worst-case Q > 0: " << (r.pd_worstcase_flow.holds ? "yes" : "no") << '\n';
    w.finish(out);
}

void cmd_comms(const RunConfig& c, const Options& o, std::ostream& out) {
    const DecodedResult d = decode(comms_config(c));
    RunWriter w("comms", c, o.out_dir);
    w.write("residual.csv", [&](std::ostream& os) { write_residual_csv(os, d); });
    w.write("spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, d.spectrum); });
    w.write("fits.json", [&](std::ostream& os) { os << fits_to_json(d); });
    for (const auto& m : d.messages) {
        out << "message " << m.index << " f=" << format_double(m.encoded_freq)
            << " peak=" << (m.peak ? format_double(m.peak->freq) : std::string("missing"));
        if (m.fit)
            out << " fit_freq=" << format_double(m.fit->freq) << " adj_r2=" << format_double(m.fit->adj_r2);
        else
            out << " fit failed: " << m.fit_error;
        out << '\n';
    }
    w.finish(out);
}

void cmd_spectrum(const RunConfig& c, const Options& o, std::ostream& out) {
    const Trajectory master = discard_transient(integrate_master(c.sim), c.sim.transient_steps);
    const Spectrum s = power_spectrum(master.x_component(2), 1.0 / c.sim.h);
    const Peak p = dominant_peak(s, s.freq.front(), s.freq.back());
    RunWriter w("spectrum", c, o.out_dir);
    w.write("spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, s); });
    w.write("resonance.json", [&](std::ostream& os) {
        nlohmann::ordered_json j;
        j["f_r"] = p.freq;
        j["power"] = p.power;
        j["bin_width"] = s.bin_width;
        os << j.dump(2) << '\n';
    });
    out << "f_r=" << format_double(p.freq) << '\n';
    w.finish(out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Master/slave synchronization of generalized Lorenz systems", "glsync"};
    app.set_version_flag("--version", GLSYNC_VERSION);
    app.require_subcommand(1);

    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Configuration file");
        sub->add_option("--out", o.out_dir, "Output root directory")->capture_default_str();
        sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    };

    auto* simulate = app.add_subcommand("simulate", "Integrate master and slave, write the trajectory");
    auto* sweep = app.add_subcommand("sweep", "Sweep sigma and fit synchronization metrics");
    auto* stability = app.add_subcommand("stability", "Evaluate the stability conditions");
    auto* comms = app.add_subcommand("comms", "Encode three messages, decode them from the slave");
    auto* spectrum = app.add_subcommand("spectrum", "Power spectrum of the free-running master's x3");
    for (auto* sub : {simulate, sweep, stability, comms, spectrum}) common(sub);

    sweep->add_option("--preset", o.preset, "literal | figure")->check(CLI::IsMember({"literal", "figure"}));
    sweep->add_option("--grid", o.grid, "start:stop:step");
    comms->add_option("--case", o.case_id, "Frequency case 1..4")->check(CLI::Range(1, 4));
    comms->add_option("--regime", o.regime, "positive | zero | negative")
        ->check(CLI::IsMember({"positive", "zero", "negative"}));
    stability->add_option("--bounds", o.bounds, "M,N,P; skips the bound-estimation run");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        RunConfig c = resolve(o);
        if (simulate->parsed()) cmd_simulate(c, o, out);
        else if (sweep->parsed()) cmd_sweep(c, o, out);
        else if (stability->parsed()) cmd_stability(c, o, out);
        else if (comms->parsed()) cmd_comms(c, o, out);
        else cmd_spectrum(c, o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const IntegrationDiverged& e) {
        err << "error: " << e.what() << '\n';
        return exit_diverged;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_ok;
}

} // namespace glsync
