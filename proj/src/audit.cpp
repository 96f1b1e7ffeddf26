#include "pintan/audit.hpp"

#include <array>
#include <sstream>

#include "json.hpp"
#include "pintan/client.hpp"
#include "pintan/sim.hpp"
#include "pintan/user.hpp"

namespace pintan {

namespace {

constexpr std::array<std::string_view, kProbeCount> kProbeNames = {
    "StaticFieldNames", "ConcurrentSessions", "LoginReplay", "TanTransactionBinding", "AbortKeepsTan",
    "ClearTextCredentials",
};

struct AccountLockedMidProbe {};

class Auditor {
public:
    Auditor(Bank& bank, const AuditCredentials& cred, const AuditOptions& options)
        : bank_(bank), cred_(cred), options_(options), now_(options.start)
    {}

    ProbeResult run(Probe p)
    {
        transcript_.clear();
        ProbeResult r{p, Verdict::Inconclusive, {}, {}};
        try {
            switch (p) {
            case Probe::StaticFieldNames: static_field_names(r); break;
            case Probe::ConcurrentSessions: concurrent_sessions(r); break;
            case Probe::LoginReplay: login_replay(r); break;
            case Probe::TanTransactionBinding: tan_binding(r); break;
            case Probe::AbortKeepsTan: abort_keeps_tan(r); break;
            case Probe::ClearTextCredentials: clear_text(r); break;
            }
        } catch (const AccountLockedMidProbe&) {
            r.verdict = Verdict::Inconclusive;
            r.reason = "account locked during the probe";
        }
        r.transcript = std::move(transcript_);
        return r;
    }

private:
    struct Session {
        std::string token;
        FieldNameTable fields;
    };

    Response send_wire(const std::string& wire)
    {
        transcript_.push_back("t=" + std::to_string(now_) + " -> " + wire);
        const std::string reply = bank_.handle_wire(wire, now_++);
        transcript_.push_back("t=" + std::to_string(now_ - 1) + " <- " + reply);
        auto response = decode_response(reply);
        if (!response)
            throw std::runtime_error("bank sent an undecodable response");
        return *response;
    }

    Response send(const Request& req, const FieldNameTable& table)
    {
        Response r = send_wire(encode_request(req, table));
        if (is_error(r, ErrorCode::AccountLocked))
            throw AccountLockedMidProbe{};
        return r;
    }

    std::string login_wire() const
    {
        return encode_request(Request{{}, LoginRequest{cred_.id, cred_.pin}}, FieldNameTable::static_names());
    }

    std::optional<Session> login()
    {
        const Response r = send_wire(login_wire());
        if (is_error(r, ErrorCode::AccountLocked))
            throw AccountLockedMidProbe{};
        if (const auto* ok = std::get_if<LoginOk>(&r))
            return Session{ok->session, ok->fields};
        return std::nullopt;
    }

    void logout(const Session& s) { send(Request{s.token, LogoutRequest{}}, s.fields); }

    std::optional<std::string> init_self_transfer(const Session& s)
    {
        const Response r = send(Request{s.token, TransferInitRequest{cred_.id, "1"}}, s.fields);
        if (const auto* p = std::get_if<Pending>(&r))
            return p->txn_id;
        return std::nullopt;
    }

    std::optional<std::string> next_tan()
    {
        if (tan_cursor_ >= cred_.tans.size())
            return std::nullopt;
        return cred_.tans[tan_cursor_++];
    }

    Response authorize(const Session& s, const std::string& txn, const std::string& tan)
    {
        return send(Request{s.token, TransferAuthorizeRequest{txn, tan}}, s.fields);
    }

    void static_field_names(ProbeResult& r)
    {
        auto a = login();
        if (!a) {
            r.reason = "login failed";
            return;
        }
        logout(*a);
        auto b = login();
        if (!b) {
            r.reason = "second login failed";
            return;
        }
        logout(*b);
        const bool same = a->fields == b->fields;
        r.verdict = same ? Verdict::Vulnerable : Verdict::NotVulnerable;
        r.reason = same ? "two sessions were served identical field names"
                        : "field names differ between sessions";
    }

    void concurrent_sessions(ProbeResult& r)
    {
        auto a = login();
        if (!a) {
            r.reason = "login failed";
            return;
        }
        const Response second = send_wire(login_wire());
        if (is_error(second, ErrorCode::ConcurrentDenied)) {
            logout(*a);
            r.verdict = Verdict::NotVulnerable;
            r.reason = "second login refused while the first session was live";
            return;
        }
        const auto* ok = std::get_if<LoginOk>(&second);
        if (ok == nullptr) {
            logout(*a);
            r.reason = "second login failed for another reason";
            return;
        }
        const Session b{ok->session, ok->fields};
        const Response read_a = send(Request{a->token, ReadRequest{ReadKind::Balance}}, a->fields);
        const Response read_b = send(Request{b.token, ReadRequest{ReadKind::Balance}}, b.fields);
        logout(b);
        logout(*a);
        const bool both = std::holds_alternative<ReadOk>(read_a) && std::holds_alternative<ReadOk>(read_b);
        r.verdict = both ? Verdict::Vulnerable : Verdict::Inconclusive;
        r.reason = both ? "two live sessions served reads" : "second session did not serve reads";
    }

    void login_replay(ProbeResult& r)
    {
        const std::string recorded = login_wire();
        auto a = login();
        if (!a) {
            r.reason = "login failed";
            return;
        }
        logout(*a);
        const Response replay = send_wire(recorded);
        if (is_error(replay, ErrorCode::AccountLocked))
            throw AccountLockedMidProbe{};
        if (const auto* ok = std::get_if<LoginOk>(&replay)) {
            logout(Session{ok->session, ok->fields});
            r.verdict = Verdict::Vulnerable;
            r.reason = "byte-identical replay of a recorded login opened a session";
        } else {
            r.verdict = Verdict::NotVulnerable;
            r.reason = "replayed login was refused";
        }
    }

    void tan_binding(ProbeResult& r)
    {
        auto s = login();
        if (!s) {
            r.reason = "login failed";
            return;
        }
        const auto txn_a = init_self_transfer(*s);
        const auto txn_b = init_self_transfer(*s);
        if (!txn_a || !txn_b) {
            logout(*s);
            r.reason = "could not open two pending transfers";
            return;
        }
        // the TAN next in line is the one meant for A, the older transaction
        const auto tan = next_tan();
        if (!tan) {
            logout(*s);
            r.reason = "no TAN left";
            return;
        }
        const Response on_b = authorize(*s, *txn_b, *tan);
        if (auto cleanup = next_tan())
            authorize(*s, *txn_a, *cleanup);
        logout(*s);
        if (std::holds_alternative<TransferOk>(on_b)) {
            r.verdict = Verdict::Vulnerable;
            r.reason = "TAN meant for transaction " + *txn_a + " authorized transaction " + *txn_b;
        } else {
            r.verdict = Verdict::NotVulnerable;
            r.reason = "TAN was refused for the other transaction";
        }
    }

    void abort_keeps_tan(ProbeResult& r)
    {
        auto s = login();
        if (!s) {
            r.reason = "login failed";
            return;
        }
        const auto abandoned = init_self_transfer(*s);
        if (!abandoned) {
            logout(*s);
            r.reason = "could not open a transfer";
            return;
        }
        // the TAN is intercepted here and never reaches the bank
        const auto intercepted = next_tan();
        logout(*s);
        if (!intercepted) {
            r.reason = "no TAN left";
            return;
        }
        now_ += options_.abort_wait_ticks;
        transcript_.push_back("t=" + std::to_string(now_) + " .. waited " + std::to_string(options_.abort_wait_ticks) +
                              " ticks holding TAN " + *intercepted);
        const Response relogin = send_wire(login_wire());
        if (is_error(relogin, ErrorCode::AccountLocked)) {
            r.verdict = Verdict::NotVulnerable;
            r.reason = "abandoned transfer locked the account";
            return;
        }
        const auto* ok = std::get_if<LoginOk>(&relogin);
        if (ok == nullptr) {
            r.reason = "login after the abort failed";
            return;
        }
        const Session t{ok->session, ok->fields};
        const auto txn = init_self_transfer(t);
        if (!txn) {
            logout(t);
            r.reason = "could not open the follow-up transfer";
            return;
        }
        const Response used = authorize(t, *txn, *intercepted);
        logout(t);
        if (std::holds_alternative<TransferOk>(used)) {
            r.verdict = Verdict::Vulnerable;
            r.reason = "TAN withheld from an abandoned transfer was accepted later";
        } else {
            r.verdict = Verdict::NotVulnerable;
            r.reason = "withheld TAN was refused";
        }
    }

    // Client side: does the browser post PIN and TAN exactly as typed?
    void clear_text(ProbeResult& r)
    {
        if (cred_.tans.empty()) {
            r.reason = "no TAN to type";
            return;
        }
        const BankForms forms = BankForms::standard(cred_.format);
        const BehaviorProfile typing = BehaviorProfile::natural();
        const FormResult login_form =
            replay(forms.login, generate_session_events(typing, {{kIdField, cred_.id}, {kPinField, cred_.pin}},
                                                        forms.login, 1));
        const FormResult tan_form =
            replay(forms.tan, generate_session_events(typing, {{kTanField, cred_.tans.back()}}, forms.tan, 2));
        const FieldNameTable table = FieldNameTable::static_names();
        const std::string login = encode_request(login_request(login_form), table);
        const std::string auth = encode_request(transfer_authorize_request("session", "txn", tan_form), table);
        transcript_.push_back("client emits " + login);
        transcript_.push_back("client emits " + auth);
        const bool pin_clear = login.find("\"" + cred_.pin + "\"") != std::string::npos;
        const bool tan_clear = auth.find("\"" + cred_.tans.back() + "\"") != std::string::npos;
        r.verdict = pin_clear && tan_clear ? Verdict::Vulnerable : Verdict::NotVulnerable;
        r.reason = pin_clear && tan_clear ? "PIN and TAN appear verbatim in client messages"
                                          : "credentials are transformed before sending";
    }

    Bank& bank_;
    const AuditCredentials& cred_;
    const AuditOptions& options_;
    Tick now_;
    std::size_t tan_cursor_ = 0;
    std::vector<std::string> transcript_;
};

} // namespace

std::string_view to_string(Probe p)
{
    return kProbeNames[static_cast<std::size_t>(p)];
}

std::optional<Probe> probe_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kProbeNames.size(); ++i)
        if (kProbeNames[i] == s)
            return static_cast<Probe>(i);
    return std::nullopt;
}

const std::vector<Probe>& probe_order()
{
    static const std::vector<Probe> order = {
        Probe::StaticFieldNames,      Probe::ConcurrentSessions, Probe::LoginReplay,
        Probe::TanTransactionBinding, Probe::AbortKeepsTan,      Probe::ClearTextCredentials,
    };
    return order;
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Vulnerable: return "Vulnerable";
    case Verdict::NotVulnerable: return "NotVulnerable";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const ProbeResult* FlawReport::find(Probe p) const
{
    for (const ProbeResult& r : results)
        if (r.probe == p)
            return &r;
    return nullptr;
}

std::optional<Verdict> FlawReport::verdict(Probe p) const
{
    const ProbeResult* r = find(p);
    return r ? std::optional<Verdict>(r->verdict) : std::nullopt;
}

FlawReport run_probes(Bank& bank, const AuditCredentials& credentials, const AuditOptions& options)
{
    Auditor auditor(bank, credentials, options);
    FlawReport report;
    for (Probe p : probe_order())
        if (!options.only || *options.only == p)
            report.results.push_back(auditor.run(p));
    return report;
}

std::string flaw_report_json(const FlawReport& report, int indent)
{
    nlohmann::ordered_json j;
    j["schema"] = "pintan-audit/1";
    nlohmann::ordered_json probes = nlohmann::ordered_json::array();
    for (const ProbeResult& r : report.results) {
        nlohmann::ordered_json p;
        p["probe"] = to_string(r.probe);
        p["verdict"] = to_string(r.verdict);
        p["reason"] = r.reason;
        p["transcript"] = r.transcript;
        probes.push_back(std::move(p));
    }
    j["probes"] = std::move(probes);
    return j.dump(indent) + "\n";
}

std::string flaw_report_text(const FlawReport& report)
{
    std::ostringstream out;
    for (const ProbeResult& r : report.results) {
        std::string name(to_string(r.probe));
        name.resize(24, ' ');
        out << name << to_string(r.verdict) << "  (" << r.reason << ")\n";
    }
    return out.str();
}

FlawReport audit_scenario(const Scenario& scenario, const AuditOptions& options)
{
    scenario.validate();
    const AccountSpec* victim = scenario.find(AccountRole::Victim);
    Rng rng(scenario.seed, "audit/account");
    const std::string id = victim->id.value_or(random_digits(rng, scenario.format.id_length));
    Credentials cred = Credentials::generate(id, scenario.format, std::max<std::size_t>(victim->tan_count, 8), rng);
    if (victim->pin)
        cred = Credentials(id, *victim->pin, cred.tans(), scenario.format);

    AuditCredentials audit{cred.id(), cred.pin(), {}, scenario.format};
    for (const TanEntry& e : cred.tans().entries())
        audit.tans.push_back(e.value);

    Bank bank(scenario.policy, derive_seed(scenario.seed, "audit/bank"));
    bank.add_account(std::move(cred), std::max<std::int64_t>(victim->balance, 1));
    return run_probes(bank, audit, options);
}

} // namespace pintan
