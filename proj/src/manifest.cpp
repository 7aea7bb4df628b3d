#include "qexcess/manifest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qexcess/errors.hpp"

namespace qexcess {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line;
    bool used = false;
};

class Reader {
public:
    Reader(std::string_view text, std::string source) : source_(std::move(source)) {
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto end = std::min(text.find('\n', pos), text.size());
            std::string_view line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError(source_, line_no, "expected 'key = value'");
            }
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) {
                throw ParseError(source_, line_no, "missing key before '='");
            }
            if (value.empty()) {
                throw ParseError(source_, line_no, "missing value for '" + key + "'");
            }
            if (entries_.count(key) != 0) {
                throw ParseError(source_, line_no,
                                 "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(entries_.at(key).line) + ")");
            }
            entries_.emplace(key, Entry{value, line_no});
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> text(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        it->second.used = true;
        return it->second.value;
    }

    std::optional<double> number(const std::string& key) {
        const auto value = text(key);
        if (!value) {
            return std::nullopt;
        }
        return to_number(key, *value);
    }

    std::optional<int> integer(const std::string& key) {
        const auto value = text(key);
        if (!value) {
            return std::nullopt;
        }
        int out = 0;
        const auto [ptr, ec] = std::from_chars(value->data(), value->data() + value->size(), out);
        if (ec != std::errc() || ptr != value->data() + value->size()) {
            fail(key, "expected an integer, got '" + *value + "'");
        }
        return out;
    }

    std::optional<std::vector<double>> list(const std::string& key) {
        const auto value = text(key);
        if (!value) {
            return std::nullopt;
        }
        std::vector<double> out;
        std::string_view rest = *value;
        while (true) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            out.push_back(to_number(key, std::string(item)));
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    /// Keys starting with `prefix`, with the prefix stripped.
    std::vector<std::string> with_prefix(const std::string& prefix) const {
        std::vector<std::string> out;
        for (const auto& [key, entry] : entries_) {
            if (key.rfind(prefix, 0) == 0 && key.size() > prefix.size()) {
                out.push_back(key.substr(prefix.size()));
            }
        }
        return out;
    }

    void exclusive(const std::string& a, const std::string& b) const {
        if (has(a) && has(b)) {
            const int line = std::max(entries_.at(a).line, entries_.at(b).line);
            throw ParseError(source_, line, "'" + a + "' and '" + b + "' are mutually exclusive");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        const auto it = entries_.find(key);
        throw ParseError(source_, it == entries_.end() ? 0 : it->second.line, key + ": " + message);
    }

    void reject_unused() const {
        for (const auto& [key, entry] : entries_) {
            if (!entry.used) {
                throw ParseError(source_, entry.line, "unknown key '" + key + "'");
            }
        }
    }

private:
    double to_number(const std::string& key, const std::string& value) const {
        double out = 0.0;
        const char* begin = value.data();
        const char* end = begin + value.size();
        if (begin != end && *begin == '+') {
            ++begin;
        }
        const auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc() || ptr != end || value.empty()) {
            fail(key, "expected a number, got '" + value + "'");
        }
        return out;
    }

    std::map<std::string, Entry> entries_;
    std::string source_;
};

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::pair<const char*, Enum>, N>& table,
                const char* what) {
    for (const auto& [name, value] : table) {
        if (text == name) {
            return value;
        }
    }
    std::string choices;
    for (const auto& [name, value] : table) {
        choices += choices.empty() ? name : std::string("|") + name;
    }
    throw ConfigError(std::string("unknown ") + what + " '" + std::string(text) + "' (expected " + choices + ")");
}

template <class Enum, std::size_t N>
std::string enum_name(Enum v, const std::array<std::pair<const char*, Enum>, N>& table) {
    for (const auto& [name, value] : table) {
        if (value == v) {
            return name;
        }
    }
    return "?";
}

constexpr std::array<std::pair<const char*, Command>, 4> kCommands{{
    {"simulate", Command::simulate}, {"steady", Command::steady},
    {"sweep", Command::sweep}, {"validate", Command::validate}}};
constexpr std::array<std::pair<const char*, OutputMode>, 3> kModes{{
    {"quantum", OutputMode::quantum}, {"classical", OutputMode::classical},
    {"excess", OutputMode::excess}}};
constexpr std::array<std::pair<const char*, InitialPolicy>, 2> kInitial{{
    {"ground_state", InitialPolicy::ground_state}, {"explicit", InitialPolicy::explicit_matrix}}};
constexpr std::array<std::pair<const char*, GridSpacing>, 2> kSpacing{{
    {"linear", GridSpacing::linear}, {"log", GridSpacing::log}}};
constexpr std::array<std::pair<const char*, Normalization>, 2> kNormalization{{
    {"fdt", Normalization::fdt}, {"none", Normalization::none}}};
constexpr std::array<std::pair<const char*, ClassicalInitial>, 2> kClassicalInitial{{
    {"zero", ClassicalInitial::zero}, {"shared", ClassicalInitial::shared}}};
constexpr std::array<std::pair<const char*, FdtReference>, 2> kFdt{{
    {"isolated", FdtReference::isolated}, {"coupled", FdtReference::coupled}}};
constexpr std::array<std::pair<const char*, NoiseRoute>, 3> kRoutes{{
    {"automatic", NoiseRoute::automatic}, {"residues", NoiseRoute::residues},
    {"resolvent", NoiseRoute::resolvent}}};

template <class Enum, std::size_t N>
Enum read_enum(Reader& r, const std::string& key, Enum fallback,
               const std::array<std::pair<const char*, Enum>, N>& table) {
    const auto value = r.text(key);
    if (!value) {
        return fallback;
    }
    try {
        return parse_enum(*value, table, key.c_str());
    } catch (const ConfigError& e) {
        r.fail(key, e.what());
    }
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) {
            out += ", ";
        }
        out += format_number(v);
    }
    return out;
}

using Entries = std::vector<std::pair<std::string, std::string>>;

Entries canonical_entries(const RunManifest& m) {
    Entries e;
    auto put = [&e](const std::string& key, std::string value) { e.emplace_back(key, std::move(value)); };
    auto num = [&put](const std::string& key, double value) { put(key, format_number(value)); };
    const auto& c = m.config;
    put("command", to_string(m.command));
    put("name", m.name);
    put("engine_version", m.engine_version);
    num("mass1", c.osc1().mass);
    num("omega1", c.osc1().eigenfrequency);
    num("gamma1", c.osc1().damping);
    num("mass2", c.osc2().mass);
    num("omega2", c.osc2().eigenfrequency);
    num("gamma2", c.osc2().damping);
    num("coupling", c.coupling());
    num("temperature1", c.bath(0).temperature);
    num("temperature2", c.bath(1).temperature);
    num("hbar_scale", m.hbar_scale);
    put("initial", enum_name(m.initial_policy, kInitial));
    if (m.initial_policy == InitialPolicy::explicit_matrix && m.initial) {
        const auto names = CovarianceMatrix::element_names();
        for (int k = 0; k < CovarianceMatrix::kIndependent; ++k) {
            num("sigma0." + std::string(names[k]), m.initial->upper()[k]);
        }
    }
    num("t_start", m.grid.start);
    num("t_stop", m.grid.stop);
    put("t_count", std::to_string(m.grid.count));
    put("t_spacing", enum_name(m.grid.spacing, kSpacing));
    put("mode", to_string(m.mode));
    put("normalization", enum_name(m.normalization, kNormalization));
    num("omega_max_factor", m.omega_max_factor);
    put("classical_initial", enum_name(m.classical_initial, kClassicalInitial));
    put("fdt_reference", enum_name(m.fdt_reference, kFdt));
    put("route", enum_name(m.route, kRoutes));
    put("sweep.couplings", join(m.sweep.couplings));
    put("sweep.temperatures", join(m.sweep.temperatures));
    for (const auto& [key, value] : m.checks) {
        num("check." + key, value);
    }
    for (const auto& [key, value] : m.inputs) {
        put("input." + key, value);
    }
    const double w01 = c.osc1().eigenfrequency;
    num("derived.coupling_normalized", normalized_coupling(c));
    num("derived.mass_ratio", c.osc2().mass / c.osc1().mass);
    num("derived.omega_ratio", c.osc2().eigenfrequency / w01);
    num("derived.gamma1_ratio", c.osc1().damping / w01);
    num("derived.gamma2_ratio", c.osc2().damping / w01);
    num("derived.t_stop_gamma", m.grid.stop * c.osc1().damping);
    return e;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string to_string(Command c) { return enum_name(c, kCommands); }
std::string to_string(OutputMode m) { return enum_name(m, kModes); }
Command parse_command(std::string_view text) { return parse_enum(text, kCommands, "command"); }
OutputMode parse_output_mode(std::string_view text) { return parse_enum(text, kModes, "mode"); }

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

PhysicalConstants RunManifest::constants() const {
    PhysicalConstants c;
    c.hbar_scale = hbar_scale;
    return c;
}

EngineOptions RunManifest::engine_options(unsigned threads) const {
    EngineOptions o;
    o.constants = constants();
    o.omega_max_factor = omega_max_factor;
    o.classical_initial = classical_initial;
    o.fdt_reference = fdt_reference;
    o.route = route;
    o.threads = threads;
    return o;
}

Scenario RunManifest::scenario() const {
    Scenario s;
    s.name = name;
    s.config = config;
    s.initial_policy = initial_policy;
    s.initial = initial;
    s.grid = grid;
    s.modes = {mode == OutputMode::quantum, mode == OutputMode::classical, mode == OutputMode::excess};
    s.normalization = normalization;
    return s;
}

RunManifest parse_config(std::string_view text, const std::string& source) {
    Reader r(text, source);
    RunManifest m;

    m.command = read_enum(r, "command", m.command, kCommands);
    if (auto v = r.text("name")) {
        m.name = *v;
    }
    if (auto v = r.text("engine_version")) {
        m.engine_version = *v;
    }
    for (const auto& key : r.with_prefix("derived.")) {
        r.number("derived." + key);
    }
    for (const auto& key : r.with_prefix("input.")) {
        m.inputs[key] = *r.text("input." + key);
    }
    auto record = [&](const std::string& key) {
        if (r.has(key)) {
            const auto value = r.text(key);
            m.inputs[key] = *value;
        }
    };

    r.exclusive("gamma1", "gamma1_ratio");
    r.exclusive("mass2", "mass_ratio");
    r.exclusive("omega2", "omega_ratio");
    r.exclusive("gamma2", "gamma2_ratio");
    r.exclusive("coupling", "coupling_normalized");
    r.exclusive("temperature", "temperature1");
    r.exclusive("temperature", "temperature2");
    r.exclusive("t_stop", "t_stop_gamma");
    for (const char* key : {"gamma1_ratio", "mass_ratio", "omega_ratio", "gamma2_ratio",
                            "coupling_normalized", "t_stop_gamma"}) {
        record(key);
    }

    const auto defaults = SystemConfig::reference_system();
    OscillatorParams o1 = defaults.osc1();
    OscillatorParams o2 = defaults.osc2();
    o1.mass = r.number("mass1").value_or(o1.mass);
    o1.eigenfrequency = r.number("omega1").value_or(o1.eigenfrequency);
    const double w01 = o1.eigenfrequency;
    o1.damping = r.number("gamma1").value_or(r.number("gamma1_ratio").value_or(0.01) * w01);
    o2.mass = r.number("mass2").value_or(r.number("mass_ratio").value_or(1.1) * o1.mass);
    o2.eigenfrequency = r.number("omega2").value_or(r.number("omega_ratio").value_or(1.1) * w01);
    o2.damping = r.number("gamma2").value_or(r.number("gamma2_ratio").value_or(0.01) * w01);

    const auto both = r.number("temperature");
    const double t1 = r.number("temperature1").value_or(both.value_or(300.0));
    const double t2 = r.number("temperature2").value_or(both.value_or(300.0));

    const auto raw_coupling = r.number("coupling");
    const auto reduced_coupling = r.number("coupling_normalized");
    try {
        double lambda = 0.0;
        if (raw_coupling) {
            lambda = *raw_coupling;
        } else {
            const double normalized = reduced_coupling.value_or(0.01);
            if (!(std::abs(normalized) < 1.0)) {
                throw ConfigError("normalized coupling " + format_number(normalized) +
                                  " violates the stability invariant |coupling| < 1");
            }
            lambda = coupling_from_normalized(normalized, o1, o2);
        }
        m.config = SystemConfig(o1, o2, {t1}, {t2}, lambda);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    m.hbar_scale = r.number("hbar_scale").value_or(1.0);
    m.constants().validate();

    m.initial_policy = read_enum(r, "initial", m.initial_policy, kInitial);
    const auto sigma_keys = r.with_prefix("sigma0.");
    if (m.initial_policy == InitialPolicy::explicit_matrix) {
        const auto names = CovarianceMatrix::element_names();
        std::array<double, CovarianceMatrix::kIndependent> upper{};
        for (int k = 0; k < CovarianceMatrix::kIndependent; ++k) {
            const auto v = r.number("sigma0." + std::string(names[k]));
            if (!v) {
                throw ConfigError("explicit initial state needs sigma0." + std::string(names[k]));
            }
            upper[k] = *v;
        }
        m.initial = CovarianceMatrix(upper);
    }
    if (!sigma_keys.empty() && m.initial_policy != InitialPolicy::explicit_matrix) {
        r.fail("sigma0." + sigma_keys.front(), "sigma0 entries need 'initial = explicit'");
    }

    m.grid = TimeGrid::standard(m.config);
    m.grid.start = r.number("t_start").value_or(0.0);
    if (auto v = r.number("t_stop")) {
        m.grid.stop = *v;
    } else if (auto g = r.number("t_stop_gamma")) {
        m.grid.stop = *g / m.config.osc1().damping;
    }
    m.grid.count = r.integer("t_count").value_or(m.grid.count);
    m.grid.spacing = read_enum(r, "t_spacing", m.grid.spacing, kSpacing);
    m.grid.validate();

    m.mode = read_enum(r, "mode", m.mode, kModes);
    m.normalization = read_enum(r, "normalization", m.normalization, kNormalization);
    m.omega_max_factor = r.number("omega_max_factor").value_or(m.omega_max_factor);
    if (!(m.omega_max_factor > 1.0) || !std::isfinite(m.omega_max_factor)) {
        throw ConfigError("omega_max_factor must be finite and greater than 1");
    }
    m.classical_initial = read_enum(r, "classical_initial", m.classical_initial, kClassicalInitial);
    m.fdt_reference = read_enum(r, "fdt_reference", m.fdt_reference, kFdt);
    m.route = read_enum(r, "route", m.route, kRoutes);

    if (auto v = r.list("sweep.couplings")) {
        m.sweep.couplings = *v;
    }
    if (auto v = r.list("sweep.temperatures")) {
        m.sweep.temperatures = *v;
    }
    m.sweep.validate();

    for (const auto& key : r.with_prefix("check.")) {
        m.checks[key] = *r.number("check." + key);
    }

    r.reject_unused();
    return m;
}

std::string serialize(const RunManifest& manifest) {
    std::string out;
    for (const auto& [key, value] : canonical_entries(manifest)) {
        out += key + " = " + value + "\n";
    }
    return out;
}

std::string manifest_json(const RunManifest& manifest, const std::string& output_path, std::size_t rows) {
    nlohmann::ordered_json j;
    j["format"] = "qexcess-manifest";
    j["output"] = output_path;
    j["rows"] = rows;
    nlohmann::ordered_json body = nlohmann::ordered_json::object();
    for (const auto& [key, value] : canonical_entries(manifest)) {
        body[key] = value;
    }
    j["manifest"] = body;
    return j.dump(2) + "\n";
}

RunManifest load_manifest(const std::string& path) {
    const std::string content = read_file(path);
    const auto first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(content);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
        }
        if (!j.contains("manifest") || !j["manifest"].is_object()) {
            throw ParseError(path, 0, "JSON sidecar has no 'manifest' object");
        }
        std::string text;
        for (const auto& [key, value] : j["manifest"].items()) {
            if (!value.is_string()) {
                throw ParseError(path, 0, "manifest value for '" + key + "' is not a string");
            }
            text += key + " = " + value.get<std::string>() + "\n";
        }
        return parse_config(text, path);
    }
    const std::string begin = "# manifest-begin";
    const std::string end = "# manifest-end";
    const auto b = content.find(begin);
    if (b != std::string::npos) {
        const auto e = content.find(end, b);
        if (e == std::string::npos) {
            throw ParseError(path, 0, "dataset header has no '# manifest-end'");
        }
        std::string text;
        std::istringstream lines(content.substr(b + begin.size(), e - b - begin.size()));
        std::string line;
        while (std::getline(lines, line)) {
            if (line.rfind("# ", 0) == 0) {
                text += line.substr(2);
            }
            text += "\n";
        }
        return parse_config(text, path);
    }
    return parse_config(content, path);
}

} // namespace qexcess
