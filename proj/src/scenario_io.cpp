#include "pintan/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pintan {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

template <class E>
using Names = std::vector<std::pair<E, std::string_view>>;

const Names<AccountRole> kRoles = {{AccountRole::Victim, "victim"},
                                   {AccountRole::Attacker, "attacker"},
                                   {AccountRole::Payee, "payee"},
                                   {AccountRole::Compromised, "compromised"},
                                   {AccountRole::Bystander, "bystander"}};
const Names<TanAcceptance> kAcceptance = {{TanAcceptance::NextOnly, "next_only"},
                                          {TanAcceptance::AnyUnused, "any_unused"}};
const Names<TanInvalidation> kInvalidation = {{TanInvalidation::UsedOnly, "used_only"},
                                              {TanInvalidation::UsedAndPredecessors, "used_and_predecessors"}};
const Names<ConcurrentSessions> kConcurrent = {{ConcurrentSessions::Allowed, "allowed"},
                                               {ConcurrentSessions::Denied, "denied"}};
const Names<FieldNaming> kFieldNaming = {{FieldNaming::Static, "static"},
                                         {FieldNaming::PerSessionRandomized, "per_session_randomized"}};
const Names<AbortPolicy::Kind> kAbort = {{AbortPolicy::Kind::Ignore, "ignore"},
                                         {AbortPolicy::Kind::LockAccount, "lock_account"}};
const Names<FieldOrder> kFieldOrder = {{FieldOrder::Natural, "natural"},
                                       {FieldOrder::RandomPermutation, "random_permutation"}};
const Names<TanRetry> kTanRetry = {{TanRetry::RetrySameThenNext, "retry_same_then_next"},
                                   {TanRetry::NextImmediately, "next_immediately"}};
const Names<AttackMode> kModes = {{AttackMode::KillAndSteal, "kill_and_steal"},
                                  {AttackMode::SessionSniper, "session_sniper"},
                                  {AttackMode::Phishing, "phishing"},
                                  {AttackMode::MIM, "mim"}};
const Names<SpyTier> kTiers = {{SpyTier::Blind, "blind"}, {SpyTier::FieldAware, "field_aware"}};

template <class E>
std::string_view name_of(const Names<E>& names, E value)
{
    for (const auto& [e, n] : names)
        if (e == value)
            return n;
    return "?";
}

// A JSON object together with its path, for error messages.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ScenarioInvalid(path_.empty() ? "(root)" : path_, "expected an object");
    }

    void allow(std::initializer_list<std::string_view> keys) const
    {
        const std::set<std::string_view> ok(keys);
        for (const auto& [key, value] : j_.items())
            if (ok.count(key) == 0)
                throw ScenarioInvalid(at(key), "unknown key");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string at(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
    const json& raw(const std::string& key) const { return j_.at(key); }

    Node object(const std::string& key) const { return Node(j_.at(key), at(key)); }

    std::int64_t integer(const std::string& key) const
    {
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            throw ScenarioInvalid(at(key), "expected an integer");
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
            throw ScenarioInvalid(at(key), "integer out of range");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key) const
    {
        const json& v = j_.at(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ScenarioInvalid(at(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::size_t count(const std::string& key) const { return static_cast<std::size_t>(unsigned_integer(key)); }

    double number(const std::string& key) const
    {
        const json& v = j_.at(key);
        if (!v.is_number())
            throw ScenarioInvalid(at(key), "expected a number");
        return v.get<double>();
    }

    bool boolean(const std::string& key) const
    {
        const json& v = j_.at(key);
        if (!v.is_boolean())
            throw ScenarioInvalid(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key) const
    {
        const json& v = j_.at(key);
        if (!v.is_string())
            throw ScenarioInvalid(at(key), "expected a string");
        return v.get<std::string>();
    }

    template <class E>
    E choice(const std::string& key, const Names<E>& names) const
    {
        const std::string s = string(key);
        std::string options;
        for (const auto& [e, n] : names) {
            if (n == s)
                return e;
            options += (options.empty() ? "" : ", ") + std::string(n);
        }
        throw ScenarioInvalid(at(key), "unknown value \"" + s + "\" (expected one of " + options + ")");
    }

    TickDistribution distribution(const std::string& key) const
    {
        const json& v = j_.at(key);
        if (v.is_number_integer())
            return TickDistribution::constant(integer(key));
        const Node d = object(key);
        d.allow({"kind", "value", "lo", "hi", "values"});
        const std::string kind = d.string("kind");
        try {
            if (kind == "constant") {
                d.allow({"kind", "value"});
                return TickDistribution::constant(d.integer("value"));
            }
            if (kind == "uniform") {
                d.allow({"kind", "lo", "hi"});
                const Tick lo = d.integer("lo");
                const Tick hi = d.integer("hi");
                if (hi < lo)
                    throw ScenarioInvalid(d.at("hi"), "must not be below lo");
                return TickDistribution::uniform(lo, hi);
            }
            if (kind == "choice") {
                d.allow({"kind", "values"});
                const json& values = d.raw("values");
                if (!values.is_array() || values.empty())
                    throw ScenarioInvalid(d.at("values"), "expected a non-empty array of integers");
                std::vector<Tick> ticks;
                for (const json& t : values) {
                    if (!t.is_number_integer())
                        throw ScenarioInvalid(d.at("values"), "expected integers");
                    ticks.push_back(t.get<Tick>());
                }
                return TickDistribution::choice(std::move(ticks));
            }
        } catch (const json::out_of_range& e) {
            throw ScenarioInvalid(d.at("kind"), "missing parameter for " + kind + " distribution");
        }
        throw ScenarioInvalid(d.at("kind"), "unknown distribution kind \"" + kind + "\"");
    }

private:
    const json& j_;
    std::string path_;
};

void read_accounts(const Node& root, Scenario& s)
{
    const json& list = root.raw("accounts");
    if (!list.is_array())
        throw ScenarioInvalid("accounts", "expected an array");
    s.accounts.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Node a(list[i], "accounts[" + std::to_string(i) + "]");
        a.allow({"name", "role", "balance", "tan_count", "stolen_tans", "id", "pin"});
        AccountSpec spec;
        if (!a.has("name"))
            throw ScenarioInvalid(a.at("name"), "required");
        spec.name = a.string("name");
        if (!a.has("role"))
            throw ScenarioInvalid(a.at("role"), "required");
        spec.role = a.choice("role", kRoles);
        if (a.has("balance"))
            spec.balance = a.integer("balance");
        if (a.has("tan_count"))
            spec.tan_count = a.count("tan_count");
        if (a.has("stolen_tans"))
            spec.stolen_tans = a.count("stolen_tans");
        if (a.has("id"))
            spec.id = a.string("id");
        if (a.has("pin"))
            spec.pin = a.string("pin");
        s.accounts.push_back(std::move(spec));
    }
}

void read_policy(const Node& p, ServerPolicy& policy)
{
    p.allow({"preset", "tan_acceptance", "tan_invalidation", "concurrent_sessions", "abort_policy", "ben_enabled",
             "field_names", "login_lockout_threshold", "session_timeout_ticks"});
    if (p.has("preset")) {
        const std::string preset = p.string("preset");
        if (preset == "baseline_flawed")
            policy = ServerPolicy::baseline_flawed();
        else if (preset == "hardened")
            policy = ServerPolicy::hardened();
        else
            throw ScenarioInvalid(p.at("preset"), "unknown preset \"" + preset + "\"");
    }
    if (p.has("tan_acceptance"))
        policy.tan_policy.acceptance = p.choice("tan_acceptance", kAcceptance);
    if (p.has("tan_invalidation"))
        policy.tan_policy.invalidation = p.choice("tan_invalidation", kInvalidation);
    if (p.has("concurrent_sessions"))
        policy.concurrent_sessions = p.choice("concurrent_sessions", kConcurrent);
    if (p.has("abort_policy")) {
        const Node a = p.object("abort_policy");
        a.allow({"kind", "timeout_ticks"});
        policy.abort_policy.kind = a.choice("kind", kAbort);
        if (policy.abort_policy.kind == AbortPolicy::Kind::LockAccount) {
            if (!a.has("timeout_ticks"))
                throw ScenarioInvalid(a.at("timeout_ticks"), "required for lock_account");
            policy.abort_policy.timeout_ticks = a.integer("timeout_ticks");
        } else {
            if (a.has("timeout_ticks"))
                throw ScenarioInvalid(a.at("timeout_ticks"), "only valid with lock_account");
            policy.abort_policy.timeout_ticks = 0;
        }
    }
    if (p.has("ben_enabled"))
        policy.ben_enabled = p.boolean("ben_enabled");
    if (p.has("field_names"))
        policy.field_names = p.choice("field_names", kFieldNaming);
    if (p.has("login_lockout_threshold"))
        policy.login_lockout_threshold = static_cast<unsigned>(p.count("login_lockout_threshold"));
    if (p.has("session_timeout_ticks"))
        policy.session_timeout_ticks = p.integer("session_timeout_ticks");
}

void read_behavior(const Node& b, Scenario& s)
{
    b.allow({"preset", "field_order", "split_segments", "mistype_rate", "navigation", "paste_prob", "terminator",
             "tan_retry", "transfer"});
    BehaviorProfile& p = s.behavior;
    const TickDistribution relogin = p.relogin_delay;
    if (b.has("preset")) {
        const std::string preset = b.string("preset");
        if (preset == "natural")
            p = BehaviorProfile::natural();
        else if (preset == "full_confusion")
            p = BehaviorProfile::full_confusion();
        else
            throw ScenarioInvalid(b.at("preset"), "unknown preset \"" + preset + "\"");
        p.relogin_delay = relogin;
    }
    if (b.has("field_order"))
        p.field_order = b.choice("field_order", kFieldOrder);
    if (b.has("split_segments")) {
        p.split_segments = b.count("split_segments");
        if (p.split_segments == 0)
            throw ScenarioInvalid(b.at("split_segments"), "must be at least 1");
    }
    if (b.has("mistype_rate"))
        p.mistype_rate = b.number("mistype_rate");
    if (b.has("navigation")) {
        const Node n = b.object("navigation");
        n.allow({"tab", "mouse", "arrows"});
        p.navigation = NavigationMix{n.has("tab") ? n.number("tab") : 0.0, n.has("mouse") ? n.number("mouse") : 0.0,
                                     n.has("arrows") ? n.number("arrows") : 0.0};
    }
    if (b.has("paste_prob"))
        p.paste_prob = b.number("paste_prob");
    if (b.has("terminator")) {
        const Node t = b.object("terminator");
        t.allow({"enter", "click_submit"});
        p.terminator = TerminatorMix{t.has("enter") ? t.number("enter") : 0.0,
                                     t.has("click_submit") ? t.number("click_submit") : 0.0};
    }
    if (b.has("tan_retry"))
        p.tan_retry = b.choice("tan_retry", kTanRetry);
    if (b.has("transfer")) {
        const Node t = b.object("transfer");
        t.allow({"to", "amount"});
        if (t.has("to"))
            s.intent.to = t.string("to");
        if (t.has("amount"))
            s.intent.amount = t.integer("amount");
    }
}

void read_attacker(const Node& a, AttackerConfig& cfg)
{
    a.allow({"mode", "account", "amount", "obfuscation_hops", "donation_fraction", "gullibility", "spy_tier",
             "clipboard_visible"});
    if (a.has("mode"))
        cfg.mode = a.choice("mode", kModes);
    if (a.has("account"))
        cfg.attacker_account = a.string("account");
    if (a.has("amount"))
        cfg.amount = a.integer("amount");
    if (a.has("obfuscation_hops"))
        cfg.obfuscation_hops = a.count("obfuscation_hops");
    if (a.has("donation_fraction"))
        cfg.donation_fraction = a.number("donation_fraction");
    if (a.has("gullibility"))
        cfg.gullibility = a.number("gullibility");
    if (a.has("spy_tier"))
        cfg.spy_tier = a.choice("spy_tier", kTiers);
    if (a.has("clipboard_visible"))
        cfg.clipboard_visible = a.boolean("clipboard_visible");
}

void read_target(const Node& t, CredentialFormat& fmt)
{
    t.allow({"id_length", "pin_length", "tan_length", "ben_length"});
    if (t.has("id_length"))
        fmt.id_length = t.count("id_length");
    if (t.has("pin_length"))
        fmt.pin_length = t.count("pin_length");
    if (t.has("tan_length"))
        fmt.tan_length = t.count("tan_length");
    if (t.has("ben_length"))
        fmt.ben_length = t.count("ben_length");
}

void read_timing(const Node& t, Scenario& s)
{
    t.allow({"robot_latency", "relogin_delay"});
    if (t.has("robot_latency"))
        s.attacker.robot_latency = t.distribution("robot_latency");
    if (t.has("relogin_delay"))
        s.behavior.relogin_delay = t.distribution("relogin_delay");
}

ordered_json distribution_json(const TickDistribution& d)
{
    ordered_json j;
    switch (d.kind) {
    case TickDistribution::Kind::Constant:
        return ordered_json(d.lo);
    case TickDistribution::Kind::Uniform:
        j["kind"] = "uniform";
        j["lo"] = d.lo;
        j["hi"] = d.hi;
        break;
    case TickDistribution::Kind::Choice:
        j["kind"] = "choice";
        j["values"] = d.choices;
        break;
    }
    return j;
}

} // namespace

Scenario parse_scenario(std::string_view text, const ScenarioLoadOptions& options)
{
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded())
        throw ScenarioInvalid("(root)", "not valid JSON");
    const Node root(doc, "");
    root.allow({"accounts", "policy", "behavior", "attacker", "target_profile", "timing", "seed", "max_ticks"});

    Scenario s = Scenario::baseline();
    s.intent.to.clear();
    s.attacker.attacker_account.clear();
    if (options.seed_override)
        s.seed = *options.seed_override;
    else if (root.has("seed"))
        s.seed = root.unsigned_integer("seed");
    else
        throw ScenarioInvalid("seed", "required (or pass --seed)");

    if (!root.has("accounts"))
        throw ScenarioInvalid("accounts", "required");
    read_accounts(root, s);
    if (root.has("policy"))
        read_policy(root.object("policy"), s.policy);
    if (root.has("behavior"))
        read_behavior(root.object("behavior"), s);
    if (root.has("attacker"))
        read_attacker(root.object("attacker"), s.attacker);
    if (root.has("target_profile"))
        read_target(root.object("target_profile"), s.format);
    if (root.has("timing"))
        read_timing(root.object("timing"), s);
    if (root.has("max_ticks"))
        s.max_ticks = root.integer("max_ticks");

    if (s.attacker.attacker_account.empty())
        if (const AccountSpec* a = s.find(AccountRole::Attacker))
            s.attacker.attacker_account = a->name;
    if (s.intent.to.empty()) {
        const AccountSpec* payee = s.find(AccountRole::Payee);
        if (payee == nullptr)
            throw ScenarioInvalid("behavior.transfer.to", "required when no account has role payee");
        s.intent.to = payee->name;
    }
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path, const ScenarioLoadOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ScenarioInvalid("(file)", "cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), options);
}

std::string scenario_to_json(const Scenario& s, int indent)
{
    ordered_json j;
    j["seed"] = s.seed;
    j["max_ticks"] = s.max_ticks;

    ordered_json accounts = ordered_json::array();
    for (const AccountSpec& a : s.accounts) {
        ordered_json aj;
        aj["name"] = a.name;
        aj["role"] = name_of(kRoles, a.role);
        aj["balance"] = a.balance;
        aj["tan_count"] = a.tan_count;
        aj["stolen_tans"] = a.stolen_tans;
        if (a.id)
            aj["id"] = *a.id;
        if (a.pin)
            aj["pin"] = *a.pin;
        accounts.push_back(std::move(aj));
    }
    j["accounts"] = std::move(accounts);

    const ServerPolicy& p = s.policy;
    ordered_json pj;
    pj["tan_acceptance"] = name_of(kAcceptance, p.tan_policy.acceptance);
    pj["tan_invalidation"] = name_of(kInvalidation, p.tan_policy.invalidation);
    pj["concurrent_sessions"] = name_of(kConcurrent, p.concurrent_sessions);
    ordered_json abort;
    abort["kind"] = name_of(kAbort, p.abort_policy.kind);
    if (p.abort_policy.kind == AbortPolicy::Kind::LockAccount)
        abort["timeout_ticks"] = p.abort_policy.timeout_ticks;
    pj["abort_policy"] = std::move(abort);
    pj["ben_enabled"] = p.ben_enabled;
    pj["field_names"] = name_of(kFieldNaming, p.field_names);
    pj["login_lockout_threshold"] = p.login_lockout_threshold;
    pj["session_timeout_ticks"] = p.session_timeout_ticks;
    j["policy"] = std::move(pj);

    const BehaviorProfile& b = s.behavior;
    ordered_json bj;
    bj["field_order"] = name_of(kFieldOrder, b.field_order);
    bj["split_segments"] = b.split_segments;
    bj["mistype_rate"] = b.mistype_rate;
    bj["navigation"] = {{"tab", b.navigation.tab}, {"mouse", b.navigation.mouse}, {"arrows", b.navigation.arrows}};
    bj["paste_prob"] = b.paste_prob;
    bj["terminator"] = {{"enter", b.terminator.enter}, {"click_submit", b.terminator.click_submit}};
    bj["tan_retry"] = name_of(kTanRetry, b.tan_retry);
    bj["transfer"] = {{"to", s.intent.to}, {"amount", s.intent.amount}};
    j["behavior"] = std::move(bj);

    const AttackerConfig& a = s.attacker;
    ordered_json aj;
    aj["mode"] = name_of(kModes, a.mode);
    aj["account"] = a.attacker_account;
    aj["amount"] = a.amount;
    aj["obfuscation_hops"] = a.obfuscation_hops;
    aj["donation_fraction"] = a.donation_fraction;
    aj["gullibility"] = a.gullibility;
    aj["spy_tier"] = name_of(kTiers, a.spy_tier);
    aj["clipboard_visible"] = a.clipboard_visible;
    j["attacker"] = std::move(aj);

    j["target_profile"] = {{"id_length", s.format.id_length},
                           {"pin_length", s.format.pin_length},
                           {"tan_length", s.format.tan_length},
                           {"ben_length", s.format.ben_length}};
    ordered_json timing;
    timing["robot_latency"] = distribution_json(a.robot_latency);
    timing["relogin_delay"] = distribution_json(b.relogin_delay);
    j["timing"] = std::move(timing);
    return j.dump(indent) + "\n";
}

} // namespace pintan
