#include "pintan/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pintan/audit.hpp"
#include "pintan/report.hpp"
#include "pintan/scenario_io.hpp"

namespace pintan {

namespace {

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f.flush())
        throw std::runtime_error("failed writing " + path);
}

int cmd_run(const std::string& file, std::optional<std::uint64_t> seed, const std::string& out_path,
            std::size_t repeat, std::ostream& out)
{
    const Scenario base = load_scenario_file(file, ScenarioLoadOptions{seed});
    if (repeat <= 1) {
        const AttackReport report = run_scenario(base);
        out << summary_text(report);
        if (!out_path.empty())
            write_file(out_path, report_json(report));
        return kExitOk;
    }

    AggregateReport aggregate;
    for (std::size_t k = 0; k < repeat; ++k) {
        Scenario s = base;
        s.seed = base.seed + k;
        aggregate.runs.push_back(run_scenario(s));
    }
    for (const AttackReport& r : aggregate.runs)
        out << "seed " << r.seed << ": " << (r.success ? "success" : "failure") << ", stolen " << r.stolen_amount
            << ", TAN used by " << to_string(r.tan_used_by) << "\n";
    out << "success rate: " << aggregate.successes() << "/" << aggregate.runs.size() << " (" << std::fixed
        << std::setprecision(3) << aggregate.success_rate() << ")\n";
    if (!out_path.empty())
        write_file(out_path, aggregate_json(aggregate));
    return kExitOk;
}

int cmd_audit(const std::string& file, std::optional<Probe> only, const std::string& out_path, std::ostream& out)
{
    const Scenario scenario = load_scenario_file(file);
    AuditOptions options;
    options.only = only;
    const FlawReport report = audit_scenario(scenario, options);
    out << flaw_report_text(report);
    if (!out_path.empty())
        write_file(out_path, flaw_report_json(report));
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"PIN/TAN attack simulator and flaw auditor", "pintan"};
    app.require_subcommand(1);

    std::string file;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::size_t repeat = 1;
    std::string only;

    CLI::App* run = app.add_subcommand("run", "simulate a scenario");
    run->add_option("file", file, "scenario file")->required();
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_path, "write the JSON report here");
    run->add_option("--repeat", repeat, "run seeds seed..seed+K-1 and aggregate")->check(CLI::PositiveNumber);

    CLI::App* audit = app.add_subcommand("audit", "probe a bank configured as in the scenario");
    audit->add_option("file", file, "scenario file")->required();
    audit->add_option("--out", out_path, "write the JSON flaw report here");

    std::vector<std::string> names;
    for (Probe p : probe_order())
        names.emplace_back(to_string(p));
    CLI::App* probe = app.add_subcommand("probe", "run a single audit probe");
    probe->add_option("file", file, "scenario file")->required();
    probe->add_option("--only", only, "probe name")->required()->check(CLI::IsMember(names));
    probe->add_option("--out", out_path, "write the JSON flaw report here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (run->parsed())
            return cmd_run(file, seed, out_path, repeat, out);
        if (audit->parsed())
            return cmd_audit(file, std::nullopt, out_path, out);
        return cmd_audit(file, probe_from_string(only), out_path, out);
    } catch (const ScenarioInvalid& e) {
        err << "scenario invalid: " << e.what() << "\n";
        return kExitScenarioInvalid;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace pintan
