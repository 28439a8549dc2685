#include "loopcoh/cli.hpp"

#include "loopcoh/borel.hpp"
#include "loopcoh/division.hpp"
#include "loopcoh/lbar.hpp"
#include "loopcoh/loop_algebra.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace loopcoh::cli {

using nlohmann::json;

std::map<std::string, std::string> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("--config", "cannot open '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int number = 0;
    auto trim = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("--config", fmt::format("{}:{}: expected key=value", path, number));
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

namespace {

struct CommandInfo {
    const char* name;
    const char* help;
    std::vector<std::string> formats;
    const char* default_format;
    bool needs_n;
};

const std::vector<CommandInfo>& commands()
{
    static const std::vector<CommandInfo> list = {
        {"em", "Poincare series of H*(K(Z/2,m_1) x ...)", {"csv", "json", "txt"}, "csv", false},
        {"loop", "dimensions and generators of L_n(A)", {"csv", "json", "txt"}, "csv", true},
        {"borel", "E_{n+1} page or its cohomology as a chart", {"csv", "json", "svg", "txt"}, "txt", true},
        {"lbar", "dimension table of lbar_n", {"csv", "json", "txt"}, "csv", true},
        {"verify", "compare lbar_n with the cohomology of the Borel page", {"csv", "json", "txt"}, "txt", true},
        {"beta", "beta table of a finite module", {"csv", "json", "txt"}, "csv", false},
        {"divide", "presentation of A : N", {"json", "txt"}, "txt", false},
    };
    return list;
}

const CommandInfo& command_info(const std::string& name)
{
    for (const auto& c : commands())
        if (name == c.name)
            return c;
    throw UsageError("command", "unknown command " + name);
}

// Settings that a config file or the environment may supply as well as a flag.
const std::vector<std::string> kKeys = {"n", "spec", "degree", "format", "out", "cache", "jobs", "module"};

std::string env_name(const std::string& key)
{
    std::string out = "LOOPCOH_";
    for (char c : key)
        out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

int parse_int(const std::string& flag, const std::string& text)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(flag, "expected an integer, got '" + text + "'");
    }
}

std::string spec_label(const unstable::EMSpaceSpec& spec) { return spec.is_point() ? "point" : spec.to_string(); }

// ---------------------------------------------------------------------------
// Payloads. Everything printed is rendered from these, so a cached run and a
// fresh run print the same bytes.

json compute_em(const JobConfig& c)
{
    auto A = unstable::FreeUnstableAlgebra::from_spec(c.spec, c.degree);
    return {{"series", A.poincare_series(c.degree)}};
}

json compute_loop(const JobConfig& c)
{
    division::LoopAlgebra L(c.spec, c.n, c.degree);
    json gens = json::array();
    const auto& LA = L.algebra();
    for (std::uint32_t g = 0; g < LA.generators().size(); ++g) {
        const auto& gen = LA.generator(g);
        gens.push_back({{"name", gen.name}, {"degree", gen.degree}, {"kind", L.is_da_type(g) ? "da" : "a"}});
    }
    return {{"dims", L.dims()}, {"kernel", L.kernel_dims()}, {"homology", L.homology_dims()}, {"generators", gens}};
}

json chart_json(const borel::ChartData& chart)
{
    json cells = json::array();
    for (const auto& cell : chart.cells)
        cells.push_back({{"p", cell.p}, {"q", cell.q}, {"dim", cell.dim}, {"verified", cell.verified}});
    json arrows = json::array();
    for (const auto& [p, q] : chart.arrows)
        arrows.push_back({p, q});
    return {{"n", chart.n}, {"cutoff", chart.cutoff}, {"is_page", chart.is_page}, {"cells", cells}, {"arrows", arrows}};
}

borel::ChartData chart_from_json(const json& j)
{
    borel::ChartData chart;
    chart.n = j.at("n");
    chart.cutoff = j.at("cutoff");
    chart.is_page = j.at("is_page");
    for (const auto& cell : j.at("cells"))
        chart.cells.push_back({cell.at("p"), cell.at("q"), cell.at("dim"), cell.at("verified")});
    for (const auto& a : j.at("arrows"))
        chart.arrows.emplace_back(a.at(0).get<int>(), a.at(1).get<int>());
    return chart;
}

json compute_borel(const JobConfig& c)
{
    auto page = borel::build_page(c.spec, c.n, c.degree);
    if (c.page)
        return {{"chart", chart_json(borel::chart_data(page))}};
    borel::CohomologyOptions opts;
    opts.jobs = c.jobs;
    auto coh = borel::cohomology(page, opts);
    return {{"chart", chart_json(borel::chart_data(coh))}, {"series", borel::gr_poincare(coh)}};
}

json compute_lbar(const JobConfig& c)
{
    auto L = std::make_shared<const division::LoopAlgebra>(c.spec, c.n, c.degree);
    lbar::ZetaBasis Z(L);
    auto table = lbar::lbar_dims(*L, Z.free_series(c.degree));
    json cells = json::array();
    for (const auto& [pq, dim] : table.cells)
        cells.push_back({{"p", pq.first}, {"q", pq.second}, {"dim", dim}});
    json zeta = json::array();
    for (const auto& z : Z.generators())
        zeta.push_back({{"name", z.name}, {"degree", z.degree}, {"family", static_cast<int>(z.family)}});
    return {{"kernel", table.kernel}, {"zeta", table.zeta}, {"total", table.total}, {"cells", cells},
            {"zeta_generators", zeta}};
}

json compute_verify(const JobConfig& c)
{
    lbar::VerifyOptions opts;
    opts.jobs = c.jobs;
    opts.corrupt_zeta = c.corrupt_zeta;
    return lbar::report_to_json(lbar::verify_against_page(c.spec, c.n, c.degree, opts));
}

json compute_beta(const JobConfig& c)
{
    json rows = json::array();
    for (const auto& row : division::beta_table(division::builtin_module(c.module)))
        rows.push_back({{"monomial", row.x.to_string()},
                        {"value", row.value ? json(*row.value) : json(nullptr)}});
    return {{"module", c.module}, {"rows", rows}};
}

json compute_divide(const JobConfig& c)
{
    division::PresentationSource M;
    for (std::size_t s = 0; s < c.spec.factors.size(); ++s)
        M.generators.push_back({"i" + std::to_string(s), c.spec.factors[s]});
    M.is_algebra = true;
    std::ostringstream text;
    division::emit_presentation(text, M, division::builtin_module(c.module));
    return {{"module", c.module}, {"text", text.str()}};
}

json compute(const JobConfig& c)
{
    static const std::map<std::string, std::function<json(const JobConfig&)>> table = {
        {"em", compute_em},       {"loop", compute_loop}, {"borel", compute_borel},   {"lbar", compute_lbar},
        {"verify", compute_verify}, {"beta", compute_beta}, {"divide", compute_divide},
    };
    return table.at(c.command)(c);
}

// ---------------------------------------------------------------------------
// Rendering

std::string join_csv(const json& array)
{
    std::string out;
    for (const auto& v : array)
        out += (out.empty() ? "" : ",") + v.dump();
    return out;
}

void render(std::ostream& out, const JobConfig& c, const json& payload)
{
    if (c.format == "json") {
        json doc = payload;
        doc["command"] = c.command;
        doc["spec"] = spec_label(c.spec);
        doc["n"] = c.n;
        doc["cutoff"] = c.degree;
        out << doc.dump(2) << '\n';
        return;
    }
    const bool csv = c.format == "csv";

    if (c.command == "em") {
        const auto& s = payload.at("series");
        if (csv) {
            out << join_csv(s) << '\n';
        } else {
            out << "degree  dim\n";
            for (std::size_t d = 0; d < s.size(); ++d)
                out << fmt::format("{:>6}  {}\n", d, s[d].get<std::size_t>());
        }
    } else if (c.command == "loop") {
        const auto& dims = payload.at("dims");
        const auto& ker = payload.at("kernel");
        const auto& hom = payload.at("homology");
        if (csv) {
            out << "degree,dim,kernel,homology\n";
            for (std::size_t d = 0; d < dims.size(); ++d)
                out << d << ',' << dims[d] << ',' << ker[d] << ',' << (d < hom.size() ? hom[d].dump() : "") << '\n';
        } else {
            out << fmt::format("L_{} of {} through degree {}\n", c.n, spec_label(c.spec), c.degree);
            out << "generators:\n";
            for (const auto& g : payload.at("generators"))
                out << fmt::format("  {:>3}  {:<2}  {}\n", g.at("degree").get<int>(), g.at("kind").get<std::string>(),
                                   g.at("name").get<std::string>());
            out << "degree   dim  ker d  H(d)\n";
            for (std::size_t d = 0; d < dims.size(); ++d)
                out << fmt::format("{:>6} {:>5} {:>6} {:>5}\n", d, dims[d].get<std::size_t>(),
                                   ker[d].get<std::size_t>(), d < hom.size() ? hom[d].dump() : "-");
        }
    } else if (c.command == "borel") {
        borel::emit_chart(out, chart_from_json(payload.at("chart")), borel::parse_chart_format(c.format));
    } else if (c.command == "lbar") {
        if (csv) {
            out << "p,q,dim\n";
            for (const auto& cell : payload.at("cells"))
                out << cell.at("p") << ',' << cell.at("q") << ',' << cell.at("dim") << '\n';
        } else {
            out << fmt::format("lbar_{} of {} through degree {}\n", c.n, spec_label(c.spec), c.degree);
            out << "total    : " << fmt::format("{}", fmt::join(payload.at("total").get<std::vector<std::size_t>>(), " "))
                << '\n';
            out << "ker d    : " << fmt::format("{}", fmt::join(payload.at("kernel").get<std::vector<std::size_t>>(), " "))
                << '\n';
            out << "zeta alg : " << fmt::format("{}", fmt::join(payload.at("zeta").get<std::vector<std::size_t>>(), " "))
                << '\n';
            out << "zeta generators:\n";
            for (const auto& z : payload.at("zeta_generators"))
                out << fmt::format("  {:>3}  G{}  {}\n", z.at("degree").get<int>(), z.at("family").get<int>(),
                                   z.at("name").get<std::string>());
        }
    } else if (c.command == "verify") {
        const auto report = lbar::report_from_json(payload);
        if (csv) {
            out << "degree,lbar,e_infinity\n";
            for (std::size_t t = 0; t < report.total.left.size() || t < report.total.right.size(); ++t)
                out << t << ',' << (t < report.total.left.size() ? std::to_string(report.total.left[t]) : "") << ','
                    << (t < report.total.right.size() ? std::to_string(report.total.right[t]) : "") << '\n';
        } else {
            lbar::write_report_text(out, report);
        }
    } else if (c.command == "beta") {
        if (csv) {
            out << "monomial,value\n";
            for (const auto& row : payload.at("rows"))
                out << row.at("monomial").get<std::string>() << ','
                    << (row.at("value").is_null() ? std::string("-inf") : row.at("value").dump()) << '\n';
        } else {
            out << "beta for " << c.module << '\n';
            for (const auto& row : payload.at("rows"))
                out << fmt::format("  {:<16} {}\n", row.at("monomial").get<std::string>(),
                                   row.at("value").is_null() ? std::string("-inf") : row.at("value").dump());
        }
    } else if (c.command == "divide") {
        out << payload.at("text").get<std::string>();
    }
}

bool payload_failed(const JobConfig& c, const json& payload)
{
    return c.command == "verify" && payload.at("verdict") != "PASS";
}

std::string output_name(const JobConfig& c)
{
    std::string name = c.command;
    if (c.command == "beta" || c.command == "divide")
        name += "-" + c.module;
    if (c.command != "beta") {
        std::string spec = spec_label(c.spec);
        for (char& ch : spec)
            if (ch == ',' || ch == '*')
                ch = '_';
        name += "-" + spec;
    }
    if (command_info(c.command).needs_n)
        name += fmt::format("-n{}", c.n);
    if (c.command != "beta" && c.command != "divide")
        name += fmt::format("-D{}", c.degree);
    if (c.page)
        name += "-page";
    return name + "." + c.format;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Mod 2 cohomology of free loop spaces of Eilenberg-Mac Lane spaces, with a Borel construction",
                 "loopcoh"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kCodeVersion);

    std::map<std::string, std::string> values;
    std::map<std::string, std::vector<CLI::Option*>> options;
    std::string config_path;
    bool page = false;
    int corrupt = -1;
    std::vector<CLI::Option*> config_opts, corrupt_opts;

    for (const auto& info : commands()) {
        auto* sub = app.add_subcommand(info.name, info.help);
        auto add = [&](const std::string& key, const std::string& help) {
            options[key].push_back(sub->add_option("--" + key, values[key], help));
        };
        if (std::string(info.name) != "beta")
            add("spec", "EM-space factors, e.g. 2 or 2,3*2 or point");
        if (info.needs_n || std::string(info.name) == "divide")
            add("n", "sphere dimension (odd)");
        if (std::string(info.name) != "beta" && std::string(info.name) != "divide")
            add("degree", "degree cutoff D");
        add("format", "output format: " + fmt::format("{}", fmt::join(info.formats, ", ")));
        add("out", "write the result into this directory instead of stdout");
        add("cache", "cache directory (also LOOPCOH_CACHE)");
        add("jobs", "worker threads");
        if (std::string(info.name) == "beta" || std::string(info.name) == "divide")
            add("module", "finite module: sigma<k>, sphere<n>, rp<k>, rpinf<K>");
        config_opts.push_back(sub->add_option("--config", config_path, "key=value configuration file"));
        if (std::string(info.name) == "borel")
            sub->add_flag("--page", page, "chart the E_{n+1} page instead of its cohomology");
        if (std::string(info.name) == "verify")
            corrupt_opts.push_back(
                sub->add_option("--corrupt-zeta", corrupt, "negative control: shift one zeta generator degree")
                    ->check(CLI::NonNegativeNumber));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run 'loopcoh --help' for usage\n";
        return kExitUsage;
    }

    JobConfig c;
    c.command = app.get_subcommands().front()->get_name();
    const auto& info = command_info(c.command);

    try {
        // Flags beat the environment, which beats the config file.
        std::map<std::string, std::string> file;
        if (config_path.empty())
            if (const char* env = std::getenv("LOOPCOH_CONFIG"))
                config_path = env;
        if (!config_path.empty())
            file = read_config_file(config_path);
        auto given = [&](const std::string& key) {
            for (auto* o : options[key])
                if (o->count() > 0)
                    return true;
            return false;
        };
        auto resolve = [&](const std::string& key, const std::string& fallback) -> std::string {
            if (given(key))
                return values[key];
            if (const char* env = std::getenv(env_name(key).c_str()))
                return env;
            if (auto it = file.find(key); it != file.end())
                return it->second;
            return fallback;
        };
        for (const auto& [key, value] : file)
            if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
                throw UsageError("--config", "unknown key '" + key + "'");

        try {
            c.spec = unstable::EMSpaceSpec::parse(resolve("spec", "point"));
        } catch (const std::exception& e) {
            throw UsageError("--spec", e.what());
        }
        c.n = parse_int("--n", resolve("n", "1"));
        if (info.needs_n || c.command == "divide") {
            try {
                division::require_odd(c.n);
            } catch (const std::exception& e) {
                throw UsageError("--n", e.what());
            }
        }
        c.degree = parse_int("--degree", resolve("degree", "12"));
        if (c.degree < 0)
            throw UsageError("--degree", "the cutoff must be nonnegative");
        c.format = resolve("format", info.default_format);
        if (std::find(info.formats.begin(), info.formats.end(), c.format) == info.formats.end())
            throw UsageError("--format", fmt::format("'{}' is not available for {} (choose from {})", c.format, c.command,
                                                     fmt::join(info.formats, ", ")));
        c.out_dir = resolve("out", "");
        c.cache_dir = resolve("cache", "");
        const int jobs = parse_int("--jobs", resolve("jobs", "1"));
        if (jobs < 1)
            throw UsageError("--jobs", "needs at least one worker");
        c.jobs = static_cast<unsigned>(jobs);
        if (c.command == "beta" || c.command == "divide") {
            c.module = resolve("module", c.command == "divide" ? "sphere" + std::to_string(c.n) : "");
            if (c.module.empty())
                throw UsageError("--module", "a module name is required");
            try {
                division::builtin_module(c.module);
            } catch (const std::exception& e) {
                throw UsageError("--module", e.what());
            }
            if (c.command == "beta")
                c.spec = {};
        }
        if (c.command == "em" || c.command == "beta")
            c.n = 1;
        if (c.command == "beta" || c.command == "divide")
            c.degree = 0;
        c.page = page;
        for (auto* o : corrupt_opts)
            if (o->count() > 0)
                c.corrupt_zeta = static_cast<std::size_t>(corrupt);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    json payload;
    try {
        Cache cache(c.cache_dir, kCacheFormatVersion, &err);
        const std::string key = cache_key(c);
        if (auto hit = cache.load(key, c.degree)) {
            payload = std::move(*hit);
        } else {
            payload = compute(c);
            cache.store(key, c.degree, payload);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (!c.out_dir.empty()) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(c.out_dir, ec);
        const auto path = fs::path(c.out_dir) / output_name(c);
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "error: --out: cannot write " << path.string() << '\n';
            return kExitUsage;
        }
        render(file, c, payload);
        out << "wrote " << path.string() << '\n';
    } else {
        render(out, c, payload);
    }
    return payload_failed(c, payload) ? kExitVerificationFailed : kExitOk;
}

}  // namespace loopcoh::cli
