#include "pintan/report.hpp"

#include <sstream>

#include "json.hpp"

namespace pintan {

using ordered_json = nlohmann::ordered_json;

namespace {

template <class T>
ordered_json opt(const std::optional<T>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json report_object(const AttackReport& r)
{
    ordered_json j;
    j["schema"] = kReportSchema;
    j["seed"] = r.seed;
    j["mode"] = to_string(r.mode);
    j["success"] = r.success;
    j["stolen_amount"] = r.stolen_amount;
    j["tan_used_by"] = to_string(r.tan_used_by);

    ordered_json v;
    v["browser_crashed"] = r.victim.browser_crashed;
    v["saw_tan_already_used"] = r.victim.saw_tan_already_used;
    v["saw_other_tan_error"] = r.victim.saw_other_tan_error;
    v["received_ben"] = r.victim.received_ben;
    v["transfer_completed"] = r.victim.transfer_completed;
    v["saw_account_locked"] = r.victim.saw_account_locked;
    v["login_denied"] = r.victim.login_denied;
    v["errors"] = r.victim.errors;
    j["victim_observations"] = std::move(v);

    const Metrics& m = r.metrics;
    ordered_json mj;
    mj["capture_tick"] = opt(m.capture_tick);
    mj["theft_tick"] = opt(m.theft_tick);
    mj["ticks_to_theft"] = opt(m.ticks_to_theft);
    mj["relogin_tick"] = opt(m.relogin_tick);
    mj["attacker_requests"] = m.attacker_requests;
    mj["stolen_tans_used"] = m.stolen_tans_used;
    mj["donated_amount"] = m.donated_amount;
    mj["spy_killed_browser"] = m.spy_killed_browser;
    mj["robot_error"] = opt(m.robot_error);
    mj["last_tick"] = m.last_tick;
    j["metrics"] = std::move(mj);

    ordered_json balances = ordered_json::object();
    for (const auto& [name, balance] : r.final_balances)
        balances[name] = balance;
    j["final_balances"] = std::move(balances);

    ordered_json events = ordered_json::array();
    for (const LogEntry& e : r.events) {
        ordered_json ej;
        ej["tick"] = e.tick;
        ej["phase"] = to_string(e.phase);
        ej["actor"] = to_string(e.actor);
        ej["event"] = e.event;
        ej["payload"] = e.payload;
        events.push_back(std::move(ej));
    }
    j["events"] = std::move(events);
    return j;
}

} // namespace

std::string report_json(const AttackReport& report, int indent)
{
    return report_object(report).dump(indent) + "\n";
}

std::size_t AggregateReport::successes() const
{
    std::size_t n = 0;
    for (const AttackReport& r : runs)
        n += r.success ? 1 : 0;
    return n;
}

double AggregateReport::success_rate() const
{
    return runs.empty() ? 0.0 : static_cast<double>(successes()) / static_cast<double>(runs.size());
}

std::string aggregate_json(const AggregateReport& aggregate, int indent)
{
    ordered_json j;
    j["schema"] = kAggregateSchema;
    j["runs"] = aggregate.runs.size();
    j["successes"] = aggregate.successes();
    j["success_rate"] = aggregate.success_rate();
    ordered_json per_seed = ordered_json::array();
    for (const AttackReport& r : aggregate.runs) {
        ordered_json s;
        s["seed"] = r.seed;
        s["success"] = r.success;
        s["stolen_amount"] = r.stolen_amount;
        s["tan_used_by"] = to_string(r.tan_used_by);
        per_seed.push_back(std::move(s));
    }
    j["per_seed"] = std::move(per_seed);
    ordered_json reports = ordered_json::array();
    for (const AttackReport& r : aggregate.runs)
        reports.push_back(report_object(r));
    j["reports"] = std::move(reports);
    return j.dump(indent) + "\n";
}

std::string summary_text(const AttackReport& r)
{
    std::ostringstream out;
    out << "seed " << r.seed << "  mode " << to_string(r.mode) << "\n"
        << "  success: " << (r.success ? "yes" : "no") << "  stolen: " << r.stolen_amount
        << "  tan used by: " << to_string(r.tan_used_by) << "\n";
    out << "  victim saw:";
    if (r.victim.errors.empty())
        out << " no errors";
    for (const std::string& e : r.victim.errors)
        out << " " << e;
    out << (r.victim.received_ben ? "  (BEN received)" : "") << "\n";
    if (r.metrics.ticks_to_theft)
        out << "  ticks from capture to theft: " << *r.metrics.ticks_to_theft << "\n";
    if (r.metrics.robot_error)
        out << "  robot error: " << *r.metrics.robot_error << "\n";
    return out.str();
}

} // namespace pintan
