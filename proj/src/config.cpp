#include "glsync/config.hpp"

#include "glsync/error.hpp"
#include "glsync/format.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace glsync {

namespace {

constexpr std::array<std::string_view, ControlTerms::count> kTermNames{"ua1", "ub1", "uc1", "ua2",
                                                                      "ub2", "uc2", "ua3", "ub3"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::vector<double> parse_list(const std::string& value, std::size_t expected) {
    const auto parts = split(value, ',');
    if (parts.size() != expected)
        throw InvalidInput("expected " + std::to_string(expected) + " comma-separated numbers");
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(parse_double(p));
    return out;
}

std::size_t parse_count(const std::string& value) {
    std::size_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw InvalidInput("not a non-negative integer: '" + value + "'");
    return v;
}

ControlTerms parse_terms(const std::string& value) {
    if (value == "all") return {};
    ControlTerms t{0};
    if (value == "none") return t;
    for (const auto& name : split(value, ',')) {
        bool found = false;
        for (std::size_t i = 0; i < kTermNames.size(); ++i) {
            if (name == kTermNames[i]) {
                t.mask |= static_cast<std::uint8_t>(1u << i);
                found = true;
            }
        }
        if (!found) throw InvalidInput("unknown control term '" + name + "'");
    }
    return t;
}

std::string terms_text(ControlTerms t) {
    if (t.mask == 0xFF) return "all";
    if (t.mask == 0) return "none";
    std::string out;
    for (std::size_t i = 0; i < kTermNames.size(); ++i) {
        if (!t.enabled(static_cast<ControlTerms::Term>(i))) continue;
        if (!out.empty()) out += ',';
        out += kTermNames[i];
    }
    return out;
}

std::string triple(double a, double b, double c) {
    return format_double(a) + "," + format_double(b) + "," + format_double(c);
}

Band parse_band(const std::string& value) {
    const auto b = parse_list(value, 2);
    if (!(b[0] > 0.0) || !(b[1] > b[0])) throw InvalidInput("band must satisfy 0 < lo < hi");
    return {b[0], b[1]};
}

double positive(double v, const char* what) {
    if (!(v > 0.0)) throw InvalidInput(std::string(what) + " must be > 0");
    return v;
}

using Setter = void (*)(RunConfig&, const std::string&);

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s{
        {"sim",
         {
             {"h", [](RunConfig& c, const std::string& v) { c.sim.h = positive(parse_double(v), "h"); }},
             {"n_steps", [](RunConfig& c, const std::string& v) { c.sim.n_steps = parse_count(v); }},
             {"transient_steps", [](RunConfig& c, const std::string& v) { c.sim.transient_steps = parse_count(v); }},
             {"k", [](RunConfig& c, const std::string& v) { c.sim.k = parse_double(v); }},
             {"x0", [](RunConfig& c, const std::string& v) {
                  const auto x = parse_list(v, 3);
                  c.sim.x0 = {x[0], x[1], x[2]};
              }},
             {"y0", [](RunConfig& c, const std::string& v) {
                  const auto y = parse_list(v, 3);
                  c.sim.y0 = {y[0], y[1], y[2]};
              }},
             {"control_terms", [](RunConfig& c, const std::string& v) { c.sim.terms = parse_terms(v); }},
             {"convergence_eps",
              [](RunConfig& c, const std::string& v) { c.convergence_eps = positive(parse_double(v), "convergence_eps"); }},
         }},
        {"sigma",
         {
             {"s1", [](RunConfig& c, const std::string& v) { c.sim.sigma[0] = parse_double(v); }},
             {"s2", [](RunConfig& c, const std::string& v) { c.sim.sigma[1] = parse_double(v); }},
             {"s3", [](RunConfig& c, const std::string& v) { c.sim.sigma[2] = parse_double(v); }},
             {"preset", [](RunConfig& c, const std::string& v) { c.preset = parse_preset(v); }},
             {"grid", [](RunConfig& c, const std::string& v) { c.grid = parse_grid(v); }},
         }},
        {"comms",
         {
             {"case", [](RunConfig& c, const std::string& v) {
                  const auto id = parse_count(v);
                  if (id < 1 || id > 4) throw InvalidInput("case must be 1..4");
                  c.case_id = static_cast<int>(id);
              }},
             {"regime", [](RunConfig& c, const std::string& v) { c.regime = parse_regime(v); }},
             {"amplitude", [](RunConfig& c, const std::string& v) {
                  c.amplitude = parse_double(v);
                  if (!(c.amplitude >= 0.0)) throw InvalidInput("amplitude must be >= 0");
              }},
             {"offset", [](RunConfig& c, const std::string& v) { c.offset = parse_double(v); }},
             {"injection", [](RunConfig& c, const std::string& v) { c.injection = parse_injection(v); }},
             {"band1", [](RunConfig& c, const std::string& v) {
                  c.bands[0] = parse_band(v);
              }},
             {"band2", [](RunConfig& c, const std::string& v) {
                  c.bands[1] = parse_band(v);
              }},
             {"band3", [](RunConfig& c, const std::string& v) {
                  c.bands[2] = parse_band(v);
              }},
         }},
        {"stability",
         {
             {"bounds", [](RunConfig& c, const std::string& v) {
                  const auto b = parse_list(v, 3);
                  if (b[0] < 0 || b[1] < 0 || b[2] < 0) throw InvalidInput("bounds must be >= 0");
                  c.bounds = Bounds{b[0], b[1], b[2]};
              }},
         }},
    };
    return s;
}

} // namespace

std::string_view to_string(SweepPreset p) { return p == SweepPreset::literal ? "literal" : "figure"; }

SweepPreset parse_preset(std::string_view text) {
    if (text == "literal") return SweepPreset::literal;
    if (text == "figure") return SweepPreset::figure;
    throw InvalidInput("preset must be literal or figure");
}

Grid parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw InvalidInput("grid must be start:stop:step");
    Grid g{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
    parse_grid_values(g.start, g.stop, g.step); // validates
    return g;
}

Grid default_grid(SweepPreset preset) {
    return preset == SweepPreset::literal ? Grid{0.0, 1.0, 0.2} : Grid{-1.0, 1.0, 0.2};
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, int> seen; // "section.key" -> line
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string l = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ConfigError(line, "", "malformed section header");
            section = trim(l.substr(1, l.size() - 2));
            if (!schema().contains(section)) throw ConfigError(line, "", "unknown section [" + section + "]");
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "", "expected key = value");
        const std::string key = trim(l.substr(0, eq));
        const std::string value = trim(l.substr(eq + 1));
        if (section.empty()) throw ConfigError(line, key, "key outside of a section");
        const auto& keys = schema().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(line, key, "unknown key in [" + section + "]");
        if (!seen.emplace(section + "." + key, line).second) throw ConfigError(line, key, "duplicate key");
        try {
            it->second(cfg, value);
        } catch (const InvalidInput& e) {
            throw ConfigError(line, key, e.what());
        }
    }

    auto line_of = [&](const std::string& k) {
        const auto it = seen.find(k);
        return it == seen.end() ? 0 : it->second;
    };
    if (cfg.sim.n_steps == 0) throw ConfigError(line_of("sim.n_steps"), "n_steps", "must be positive");
    if (cfg.sim.transient_steps >= cfg.sim.n_steps)
        throw ConfigError(line_of("sim.transient_steps"), "transient_steps", "must be less than n_steps");
    if (!std::isfinite(cfg.sim.k)) throw ConfigError(line_of("sim.k"), "k", "must be finite");
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(cfg.sim.sigma[i] >= -1.0 && cfg.sim.sigma[i] <= 1.0)) {
            const std::string key = "s" + std::to_string(i + 1);
            throw ConfigError(line_of("sigma." + key), key, "must lie in [-1, 1]");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
    std::ostringstream os;
    os << "[sim]\n"
       << "h = " << format_double(c.sim.h) << '\n'
       << "n_steps = " << c.sim.n_steps << '\n'
       << "transient_steps = " << c.sim.transient_steps << '\n'
       << "k = " << format_double(c.sim.k) << '\n'
       << "x0 = " << triple(c.sim.x0[0], c.sim.x0[1], c.sim.x0[2]) << '\n'
       << "y0 = " << triple(c.sim.y0[0], c.sim.y0[1], c.sim.y0[2]) << '\n'
       << "control_terms = " << terms_text(c.sim.terms) << '\n'
       << "convergence_eps = " << format_double(c.convergence_eps) << '\n'
       << "\n[sigma]\n"
       << "s1 = " << format_double(c.sim.sigma[0]) << '\n'
       << "s2 = " << format_double(c.sim.sigma[1]) << '\n'
       << "s3 = " << format_double(c.sim.sigma[2]) << '\n'
       << "preset = " << to_string(c.preset) << '\n';
    if (c.grid)
        os << "grid = " << format_double(c.grid->start) << ':' << format_double(c.grid->stop) << ':'
           << format_double(c.grid->step) << '\n';
    os << "\n[comms]\n"
       << "case = " << c.case_id << '\n'
       << "regime = " << to_string(c.regime) << '\n'
       << "amplitude = " << format_double(c.amplitude) << '\n'
       << "offset = " << format_double(c.offset) << '\n'
       << "injection = " << to_string(c.injection) << '\n';
    for (std::size_t i = 0; i < 3; ++i)
        if (c.bands[i])
            os << "band" << i + 1 << " = " << format_double(c.bands[i]->lo) << ',' << format_double(c.bands[i]->hi)
               << '\n';
    if (c.bounds) os << "\n[stability]\nbounds = " << triple(c.bounds->M, c.bounds->N, c.bounds->P) << '\n';
    return os.str();
}

CommsConfig comms_config(const RunConfig& c) {
    CommsConfig cc = case_config(c.case_id, c.regime, c.sim, c.amplitude);
    for (auto& m : cc.messages) m.offset = c.offset;
    cc.injection = c.injection;
    cc.bands = c.bands;
    return cc;
}

} // namespace glsync
