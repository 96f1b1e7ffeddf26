#include "pintan/sim.hpp"

#include <deque>
#include <map>
#include <set>

#include "pintan/client.hpp"

namespace pintan {

std::string_view to_string(AccountRole r)
{
    switch (r) {
    case AccountRole::Victim: return "victim";
    case AccountRole::Attacker: return "attacker";
    case AccountRole::Payee: return "payee";
    case AccountRole::Compromised: return "compromised";
    case AccountRole::Bystander: return "bystander";
    }
    return "?";
}

std::string_view to_string(Phase p)
{
    return p == Phase::Observe ? "observe" : "act";
}

std::string_view to_string(Actor a)
{
    switch (a) {
    case Actor::User: return "user";
    case Actor::Spy: return "spy";
    case Actor::Client: return "client";
    case Actor::Bank: return "bank";
    case Actor::Raider: return "raider";
    }
    return "?";
}

std::string_view to_string(TanUser u)
{
    switch (u) {
    case TanUser::Attacker: return "attacker";
    case TanUser::Victim: return "victim";
    case TanUser::Nobody: return "nobody";
    }
    return "?";
}

int phase_rank(Phase phase, Actor actor)
{
    const int observe_rank = static_cast<int>(actor);
    return phase == Phase::Observe ? observe_rank : static_cast<int>(Actor::Raider) - observe_rank;
}

Scenario Scenario::baseline(std::uint64_t seed)
{
    Scenario s;
    s.accounts = {
        AccountSpec{"victim", AccountRole::Victim, 100000, 100, 0, std::nullopt, std::nullopt},
        AccountSpec{"payee", AccountRole::Payee, 0, 10, 0, std::nullopt, std::nullopt},
        AccountSpec{"attacker", AccountRole::Attacker, 0, 10, 0, std::nullopt, std::nullopt},
    };
    s.policy = ServerPolicy::baseline_flawed();
    s.behavior = BehaviorProfile::natural();
    s.behavior.relogin_delay = TickDistribution::constant(50);
    s.intent = VictimIntent{"payee", 250};
    s.attacker.mode = AttackMode::KillAndSteal;
    s.attacker.robot_latency = TickDistribution::constant(5);
    s.attacker.attacker_account = "attacker";
    s.seed = seed;
    return s;
}

const AccountSpec* Scenario::find(AccountRole role) const
{
    for (const AccountSpec& a : accounts)
        if (a.role == role)
            return &a;
    return nullptr;
}

const AccountSpec* Scenario::find(std::string_view name) const
{
    for (const AccountSpec& a : accounts)
        if (a.name == name)
            return &a;
    return nullptr;
}

void Scenario::validate() const
{
    if (format.id_length == 0 || format.pin_length == 0 || format.tan_length == 0 || format.ben_length == 0)
        throw ScenarioInvalid("target_profile", "credential lengths must be positive");
    if (format.id_length > 18)
        throw ScenarioInvalid("target_profile.id_length", "must be at most 18");

    std::set<std::string> names;
    std::set<std::string> ids;
    int victims = 0;
    int attackers = 0;
    for (std::size_t i = 0; i < accounts.size(); ++i) {
        const AccountSpec& a = accounts[i];
        const std::string path = "accounts[" + std::to_string(i) + "]";
        if (a.name.empty())
            throw ScenarioInvalid(path + ".name", "must not be empty");
        if (!names.insert(a.name).second)
            throw ScenarioInvalid(path + ".name", "duplicate account name " + a.name);
        if (a.balance < 0)
            throw ScenarioInvalid(path + ".balance", "must be non-negative");
        if (a.tan_count == 0)
            throw ScenarioInvalid(path + ".tan_count", "must be positive");
        if (a.stolen_tans > a.tan_count)
            throw ScenarioInvalid(path + ".stolen_tans", "exceeds tan_count");
        if (a.id) {
            if (!is_digit_string(*a.id, format.id_length))
                throw ScenarioInvalid(path + ".id", "must be " + std::to_string(format.id_length) + " digits");
            if (!ids.insert(*a.id).second)
                throw ScenarioInvalid(path + ".id", "duplicate account id");
        }
        if (a.pin && !is_digit_string(*a.pin, format.pin_length))
            throw ScenarioInvalid(path + ".pin", "must be " + std::to_string(format.pin_length) + " digits");
        victims += a.role == AccountRole::Victim;
        attackers += a.role == AccountRole::Attacker;
    }
    if (victims != 1)
        throw ScenarioInvalid("accounts", "exactly one account must have role victim");
    if (attackers != 1)
        throw ScenarioInvalid("accounts", "exactly one account must have role attacker");

    const AccountSpec* payee = find(intent.to);
    if (payee == nullptr)
        throw ScenarioInvalid("behavior.transfer.to", "no account named " + intent.to);
    if (payee->role == AccountRole::Victim)
        throw ScenarioInvalid("behavior.transfer.to", "victim cannot pay itself");
    if (intent.amount <= 0)
        throw ScenarioInvalid("behavior.transfer.amount", "must be positive");
    if (const AccountSpec* attacker_acct = find(AccountRole::Attacker);
        !attacker.attacker_account.empty() && attacker.attacker_account != attacker_acct->name)
        throw ScenarioInvalid("attacker.account", "does not name the attacker account");

    if (policy.login_lockout_threshold == 0)
        throw ScenarioInvalid("policy.login_lockout_threshold", "must be positive");
    if (policy.session_timeout_ticks < 1)
        throw ScenarioInvalid("policy.session_timeout_ticks", "must be positive");
    if (policy.abort_policy.kind == AbortPolicy::Kind::LockAccount && policy.abort_policy.timeout_ticks < 1)
        throw ScenarioInvalid("policy.abort_policy.timeout_ticks", "must be positive");

    try {
        behavior.validate();
    } catch (const DomainError& e) {
        throw ScenarioInvalid("behavior", e.what());
    }
    try {
        attacker.validate();
    } catch (const DomainError& e) {
        throw ScenarioInvalid("attacker", e.what());
    }
    if (max_ticks < 1)
        throw ScenarioInvalid("max_ticks", "must be positive");
}

namespace {

struct Envelope {
    Tick deliver_at = 0;
    Actor origin = Actor::Client;
    bool to_bank = true;
    std::string wire;
};

enum class BrowserState { Idle, OnPage, Waiting, Crashed, Closed };

struct SpyMail {
    enum class Kind { Credentials, Record } kind = Kind::Record;
    std::string id;
    std::string pin;
    std::optional<ExfiltrationRecord> record;
};

constexpr int kMaxTanAttempts = 3;
constexpr int kMaxLoginAttempts = 3;

class Simulation {
public:
    explicit Simulation(const Scenario& scenario)
        : sc_(scenario),
          bank_(scenario.policy, derive_seed(scenario.seed, "bank")),
          forms_(BankForms::standard(scenario.format)),
          profile_(TargetBankProfile::standard(scenario.format)),
          latency_rng_(scenario.seed, "raider/latency")
    {
        setup_accounts();
        const AttackMode mode = sc_.attacker.mode;
        if (mode == AttackMode::KillAndSteal || mode == AttackMode::SessionSniper) {
            spy_.emplace(sc_.attacker.spy_tier, profile_, TokenizerOptions{sc_.attacker.clipboard_visible});
            spy_armed_ = true;
        }
        if (mode == AttackMode::Phishing)
            phish_pending_ = true;
        else
            reopen_at_ = 0;
    }

    AttackReport run()
    {
        Tick t = 0;
        for (; t <= sc_.max_ticks; ++t) {
            observe(t);
            act(t);
            if (!busy(t))
                break;
        }
        return finish(std::min(t, sc_.max_ticks));
    }

private:
    // ---- setup ----------------------------------------------------------

    void setup_accounts()
    {
        Rng id_rng(sc_.seed, "accounts/ids");
        std::set<std::string> taken;
        for (const AccountSpec& a : sc_.accounts)
            if (a.id)
                taken.insert(*a.id);
        for (const AccountSpec& a : sc_.accounts) {
            std::string id;
            if (a.id) {
                id = *a.id;
            } else {
                do {
                    id = random_digits(id_rng, sc_.format.id_length);
                } while (!taken.insert(id).second);
            }
            Rng rng(sc_.seed, "accounts/" + a.name);
            Credentials cred = Credentials::generate(id, sc_.format, a.tan_count, rng);
            if (a.pin)
                cred = Credentials(id, *a.pin, cred.tans(), sc_.format);
            ids_[a.name] = id;
            names_[id] = a.name;
            initial_[a.name] = a.balance;

            std::vector<std::string> tans;
            for (const TanEntry& e : cred.tans().entries())
                tans.push_back(e.value);
            if (a.role == AccountRole::Victim) {
                victim_name_ = a.name;
                victim_id_ = id;
                victim_pin_ = cred.pin();
                victim_tans_ = tans;
            } else if (a.role == AccountRole::Attacker) {
                attacker_name_ = a.name;
            } else if (a.role == AccountRole::Bystander && donee_name_.empty()) {
                donee_name_ = a.name;
            }
            if (a.stolen_tans > 0)
                stolen_[id] = StolenAccess{id, cred.pin(),
                                           std::vector<std::string>(tans.begin(),
                                                                    tans.begin() +
                                                                        static_cast<std::ptrdiff_t>(a.stolen_tans))};
            bank_.add_account(std::move(cred), a.balance, {"rent:" + std::to_string(a.balance / 10)});
        }
        payee_id_ = ids_.at(sc_.intent.to);
        attacker_id_ = ids_.at(attacker_name_);
    }

    // ---- logging --------------------------------------------------------

    void log(Tick t, Phase phase, Actor actor, std::string event, std::string payload = {})
    {
        events_.push_back({t, phase, actor, std::move(event), std::move(payload)});
    }

    std::uint64_t seed_for(const std::string& label) const { return derive_seed(sc_.seed, label); }

    Tick draw_latency() { return sc_.attacker.robot_latency.sample(latency_rng_); }

    // ---- tick phases ----------------------------------------------------

    void observe(Tick t)
    {
        std::optional<InputEvent> input;
        if (bstate_ == BrowserState::OnPage && !script_.empty() && script_.front().tick == t) {
            input = script_.front();
            script_.pop_front();
            log(t, Phase::Observe, Actor::User, "input",
                std::string(to_string(page_)) + " " + describe(input->action));
        }
        if (input && spy_armed_)
            spy_observe(t, *input);
        client_observe(t, input);
        bank_observe(t);
        raider_observe(t);
    }

    void act(Tick t)
    {
        raider_act(t);
        bank_act(t);
        client_act(t);
    }

    bool busy(Tick t) const
    {
        if (!bank_inbox_.empty() || !client_inbox_.empty() || !raider_inbox_.empty() || !mail_.empty() ||
            !mim_out_.empty() || phish_pending_)
            return true;
        if (bstate_ == BrowserState::OnPage || bstate_ == BrowserState::Waiting || logout_pending_)
            return true;
        if ((bstate_ == BrowserState::Idle || bstate_ == BrowserState::Crashed) && reopen_at_ > t)
            return true;
        if (robot_ && !robot_->finished() && !robot_->waiting_for_tan())
            return true;
        return false;
    }

    // ---- spy ------------------------------------------------------------

    void spy_observe(Tick t, const InputEvent& input)
    {
        const SpyObservation obs = spy_->observe(input);
        const SpyMode mode =
            sc_.attacker.mode == AttackMode::SessionSniper ? SpyMode::SessionSniper : SpyMode::KillAndSteal;

        if (mode == SpyMode::SessionSniper && !credentials_sent_ && obs.id_captured && obs.pin_captured) {
            credentials_sent_ = true;
            const ExtractionResult partial = spy_->extraction();
            log(t, Phase::Observe, Actor::Spy, "credentials_ready", *partial.id);
            mail_.push_back({SpyMail::Kind::Credentials, *partial.id, *partial.pin, std::nullopt});
        }

        const SpyAction action = decide_action(obs, mode);
        if (action == SpyAction::Continue)
            return;
        auto record = make_record(spy_->extraction(), t, victim_name_, sc_.attacker.mode);
        const bool kill = action == SpyAction::KillBrowser;
        log(t, Phase::Observe, Actor::Spy, kill ? "kill_browser" : "use_now");
        if (record) {
            log(t, Phase::Observe, Actor::Spy, "exfiltrate", to_json(*record));
            mail_.push_back({SpyMail::Kind::Record, {}, {}, *record});
        }
        spy_armed_ = false;
        // the crash is the client's entry, so it follows the spy's
        if (kill) {
            metrics_.spy_killed_browser = true;
            crash_browser(t);
        }
    }

    // ---- victim and browser ----------------------------------------------

    void crash_browser(Tick t)
    {
        bstate_ = BrowserState::Crashed;
        script_.clear();
        form_.reset();
        submit_ready_ = false;
        client_inbox_.clear();
        victim_.browser_crashed = true;
        const ReloginPlan plan = victim_reaction(t, sc_.behavior, seed_for("victim/reaction"));
        reopen_at_ = plan.relogin_tick;
        if (plan.first_tan == TanChoice::Next)
            ++tan_cursor_;
        metrics_.relogin_tick = plan.relogin_tick;
        log(t, Phase::Observe, Actor::Client, "browser_crashed", "relogin at " + std::to_string(plan.relogin_tick));
    }

    void open_page(Tick t, Phase phase, Page page)
    {
        FieldValues values;
        switch (page) {
        case Page::Login:
            values = {{kIdField, victim_id_}, {kPinField, victim_pin_}};
            ++session_no_;
            break;
        case Page::Transfer:
            values = {{kToField, payee_id_}, {kAmountField, std::to_string(sc_.intent.amount)}};
            break;
        case Page::Tan:
            if (tan_cursor_ >= victim_tans_.size()) {
                close_browser(t, phase, "out of TANs");
                return;
            }
            values = {{kTanField, victim_tans_[tan_cursor_]}};
            if (!tracked_tan_) {
                tracked_tan_ = victim_tans_[tan_cursor_];
                tracked_index_ = tan_cursor_ + 1;
            }
            break;
        }
        ++page_no_;
        const std::string label = "victim/page/" + std::to_string(page_no_);
        const auto events = generate_session_events(sc_.behavior, values, forms_.page(page), seed_for(label), t + 1);
        script_.assign(events.begin(), events.end());
        form_.emplace(forms_.page(page));
        page_ = page;
        bstate_ = BrowserState::OnPage;
        submit_ready_ = false;
        if (spy_armed_)
            spy_->page_loaded(page);
        log(t, phase, Actor::Client, "open_page", std::string(to_string(page)));
    }

    void close_browser(Tick t, Phase phase, const std::string& why)
    {
        bstate_ = BrowserState::Closed;
        script_.clear();
        form_.reset();
        log(t, phase, Actor::Client, "close", why);
    }

    void client_observe(Tick t, const std::optional<InputEvent>& input)
    {
        while (!client_inbox_.empty() && client_inbox_.front().deliver_at <= t) {
            const std::string wire = std::move(client_inbox_.front().wire);
            client_inbox_.pop_front();
            handle_client_response(t, wire);
        }
        if (input && bstate_ == BrowserState::OnPage && form_) {
            form_->apply(*input);
            if (form_->terminated())
                submit_ready_ = true;
        }
    }

    void note_error(ErrorCode code) { victim_.errors.emplace_back(to_string(code)); }

    void handle_client_response(Tick t, const std::string& wire)
    {
        if (bstate_ != BrowserState::Waiting)
            return;
        const auto response = decode_response(wire);
        if (!response) {
            close_browser(t, Phase::Observe, "garbled response");
            return;
        }
        log(t, Phase::Observe, Actor::Client, "received", wire);
        const auto* err = std::get_if<ErrorResponse>(&*response);
        if (err != nullptr)
            note_error(err->code);

        switch (page_) {
        case Page::Login:
            if (const auto* ok = std::get_if<LoginOk>(&*response)) {
                session_ = ok->session;
                table_ = ok->fields;
                open_page(t, Phase::Observe, Page::Transfer);
            } else if (err != nullptr && err->code == ErrorCode::ConcurrentDenied &&
                       login_attempts_ < kMaxLoginAttempts) {
                victim_.login_denied = true;
                Rng rng(sc_.seed, "victim/retry/" + std::to_string(login_attempts_));
                reopen_at_ = t + std::max<Tick>(1, sc_.behavior.relogin_delay.sample(rng));
                bstate_ = BrowserState::Idle;
            } else {
                if (err != nullptr && err->code == ErrorCode::AccountLocked)
                    victim_.saw_account_locked = true;
                if (err != nullptr && err->code == ErrorCode::ConcurrentDenied)
                    victim_.login_denied = true;
                close_browser(t, Phase::Observe, "login failed");
            }
            break;
        case Page::Transfer:
            if (const auto* pending = std::get_if<Pending>(&*response)) {
                txn_ = pending->txn_id;
                tan_attempts_ = 0;
                open_page(t, Phase::Observe, Page::Tan);
            } else {
                if (err != nullptr && err->code == ErrorCode::AccountLocked)
                    victim_.saw_account_locked = true;
                logout_pending_ = true;
                close_browser(t, Phase::Observe, "transfer rejected");
            }
            break;
        case Page::Tan:
            if (const auto* ok = std::get_if<TransferOk>(&*response)) {
                victim_.transfer_completed = true;
                victim_.received_ben = ok->ben.has_value();
                if (last_sent_tan_ == tracked_tan_ && tan_used_by_ == TanUser::Nobody)
                    tan_used_by_ = TanUser::Victim;
                ++tan_cursor_;
                logout_pending_ = true;
                bstate_ = BrowserState::Closed;
            } else if (err != nullptr && (err->code == ErrorCode::TanAlreadyUsed ||
                                          err->code == ErrorCode::TanInvalidated ||
                                          err->code == ErrorCode::TanNotNext || err->code == ErrorCode::TanUnknown)) {
                if (err->code == ErrorCode::TanAlreadyUsed)
                    victim_.saw_tan_already_used = true;
                else
                    victim_.saw_other_tan_error = true;
                ++tan_cursor_;
                if (++tan_attempts_ < kMaxTanAttempts) {
                    open_page(t, Phase::Observe, Page::Tan);
                } else {
                    logout_pending_ = true;
                    close_browser(t, Phase::Observe, "gave up after TAN errors");
                }
            } else {
                if (err != nullptr && err->code == ErrorCode::AccountLocked)
                    victim_.saw_account_locked = true;
                close_browser(t, Phase::Observe, "authorization failed");
            }
            break;
        }
    }

    void send_from_client(Tick t, std::string wire)
    {
        if (sc_.attacker.mode == AttackMode::MIM)
            raider_inbox_.push_back({t + 1, Actor::Client, true, std::move(wire)});
        else
            bank_inbox_.push_back({t + 1, Actor::Client, true, std::move(wire)});
    }

    void client_act(Tick t)
    {
        if ((bstate_ == BrowserState::Idle || bstate_ == BrowserState::Crashed) && reopen_at_ == t) {
            ++login_attempts_;
            open_page(t, Phase::Act, Page::Login);
            return;
        }
        if (logout_pending_) {
            logout_pending_ = false;
            if (!session_.empty()) {
                std::string wire = encode_request(Request{session_, LogoutRequest{}}, table_);
                log(t, Phase::Act, Actor::Client, "submit", wire);
                send_from_client(t, std::move(wire));
            }
            return;
        }
        if (!submit_ready_ || bstate_ != BrowserState::OnPage)
            return;
        submit_ready_ = false;
        const FormResult form = form_->result();
        std::string wire;
        switch (page_) {
        case Page::Login: wire = encode_request(login_request(form), FieldNameTable::static_names()); break;
        case Page::Transfer: wire = encode_request(transfer_init_request(session_, form), table_); break;
        case Page::Tan:
            last_sent_tan_ = form[kTanField];
            wire = encode_request(transfer_authorize_request(session_, txn_, form), table_);
            break;
        }
        log(t, Phase::Act, Actor::Client, "submit", wire);
        bstate_ = BrowserState::Waiting;
        send_from_client(t, std::move(wire));
    }

    // ---- bank -----------------------------------------------------------

    void bank_observe(Tick t)
    {
        while (!bank_inbox_.empty() && bank_inbox_.front().deliver_at <= t) {
            Envelope env = std::move(bank_inbox_.front());
            bank_inbox_.pop_front();
            const std::size_t log_mark = bank_.log().size();
            std::string response = bank_.handle_wire(env.wire, t);
            log(t, Phase::Observe, Actor::Bank, "handle", env.wire + " => " + response);
            track_tan_use(env.origin, log_mark);
            track_theft(t);
            if (env.origin == Actor::Raider)
                raider_inbox_.push_back({t, Actor::Bank, false, std::move(response)});
            else if (sc_.attacker.mode == AttackMode::MIM)
                raider_inbox_.push_back({t, Actor::Bank, false, std::move(response)});
            else
                client_inbox_.push_back({t + 1, Actor::Bank, false, std::move(response)});
        }
    }

    void track_tan_use(Actor origin, std::size_t log_mark)
    {
        if (!tracked_index_ || tan_used_by_ != TanUser::Nobody)
            return;
        const auto& log = bank_.log();
        for (std::size_t i = log_mark; i < log.size(); ++i) {
            const BankEvent& e = log[i];
            if (e.kind == BankEventKind::TanAccepted && e.account == victim_id_ &&
                e.detail == std::to_string(*tracked_index_)) {
                tan_used_by_ = origin == Actor::Raider ? TanUser::Attacker : TanUser::Victim;
                return;
            }
        }
    }

    void track_theft(Tick t)
    {
        if (!metrics_.theft_tick && bank_.balance(attacker_id_) > initial_.at(attacker_name_))
            metrics_.theft_tick = t;
    }

    void bank_act(Tick t)
    {
        bank_.tick_sweep(t);
        const auto& log = bank_.log();
        for (; bank_log_seen_ < log.size(); ++bank_log_seen_) {
            const BankEvent& e = log[bank_log_seen_];
            if (e.kind == BankEventKind::AccountLocked || e.kind == BankEventKind::SessionExpired)
                this->log(t, Phase::Act, Actor::Bank, std::string(to_string(e.kind)),
                          names_.at(e.account) + " " + e.detail);
        }
    }

    // ---- raider ---------------------------------------------------------

    void raider_observe(Tick t)
    {
        if (phish_pending_) {
            phish_pending_ = false;
            const VictimSecrets secrets{victim_name_, victim_id_, victim_pin_, victim_tans_.front()};
            auto record = phish(secrets, sc_.attacker.gullibility, seed_for("raider/phish"), t);
            log(t, Phase::Observe, Actor::Raider, "phish", record ? to_json(*record) : "no bite");
            if (record) {
                tracked_tan_ = record->tan;
                tracked_index_ = 1;
                start_robot(t, *record);
            }
        }

        for (SpyMail& mail : mail_) {
            if (mail.kind == SpyMail::Kind::Credentials) {
                start_sniper(t, mail.id, mail.pin);
            } else if (sc_.attacker.mode == AttackMode::SessionSniper) {
                log(t, Phase::Observe, Actor::Raider, "tan_received", mail.record->tan);
                if (robot_)
                    robot_->add_tan(mail.record->id, mail.record->tan);
                metrics_.capture_tick = t;
            } else {
                start_robot(t, *mail.record);
            }
        }
        mail_.clear();

        while (!raider_inbox_.empty() && raider_inbox_.front().deliver_at <= t) {
            Envelope env = std::move(raider_inbox_.front());
            raider_inbox_.pop_front();
            if (env.origin == Actor::Client) {
                intercept_request(t, std::move(env.wire));
            } else if (sc_.attacker.mode == AttackMode::MIM && !robot_) {
                intercept_response(t, std::move(env.wire));
            } else if (robot_) {
                robot_->on_response(env.wire);
                if (robot_->finished())
                    robot_finished(t);
            }
        }
    }

    void start_robot(Tick t, const ExfiltrationRecord& record)
    {
        metrics_.capture_tick = record.capture_tick;
        if (!tracked_tan_) {
            tracked_tan_ = record.tan;
            for (std::size_t i = 0; i < victim_tans_.size(); ++i)
                if (victim_tans_[i] == record.tan)
                    tracked_index_ = i + 1;
        }
        log(t, Phase::Observe, Actor::Raider, "record_received", to_json(record));

        std::map<std::string, std::size_t> spare{{record.id, 1}};
        std::map<std::string, StolenAccess> access{{record.id, StolenAccess{record.id, record.pin, {record.tan}}}};
        for (const auto& [id, stolen] : stolen_) {
            if (id == record.id)
                continue;
            spare[id] = stolen.tans.size();
            access[id] = stolen;
        }
        const Donation donation{sc_.attacker.donation_fraction,
                                donee_name_.empty() ? std::string{} : ids_.at(donee_name_)};
        HopPlan plan = plan_hops(spare, record.id, sc_.attacker.amount, sc_.attacker.obfuscation_hops, attacker_id_,
                                 seed_for("raider/plan"), donation);
        if (const auto* infeasible = std::get_if<PlanInfeasible>(&plan)) {
            log(t, Phase::Observe, Actor::Raider, "plan_infeasible", infeasible->reason);
            return;
        }
        auto& transfers = std::get<std::vector<PlannedTransfer>>(plan);
        std::string route;
        for (const PlannedTransfer& p : transfers)
            route += (route.empty() ? "" : ", ") + name_of(p.from) + "->" + name_of(p.to) + ":" +
                     std::to_string(p.amount);
        robot_.emplace(std::move(transfers), std::move(access), profile_.field_names);
        robot_start_ = t + draw_latency();
        log(t, Phase::Observe, Actor::Raider, "robot_scheduled", "at " + std::to_string(robot_start_) + " " + route);
    }

    void start_sniper(Tick t, const std::string& id, const std::string& pin)
    {
        std::map<std::string, StolenAccess> access{{id, StolenAccess{id, pin, {}}}};
        robot_.emplace(std::vector<PlannedTransfer>{{id, attacker_id_, sc_.attacker.amount}}, std::move(access),
                       profile_.field_names, true);
        robot_start_ = t + draw_latency();
        log(t, Phase::Observe, Actor::Raider, "sniper_scheduled", "at " + std::to_string(robot_start_));
    }

    void robot_finished(Tick t)
    {
        metrics_.stolen_tans_used = robot_->tans_used();
        if (robot_->error())
            metrics_.robot_error = std::string(to_string(*robot_->error()));
        log(t, Phase::Observe, Actor::Raider, robot_->succeeded() ? "robot_succeeded" : "robot_failed",
            metrics_.robot_error.value_or(""));
    }

    std::string name_of(const std::string& id) const
    {
        auto it = names_.find(id);
        return it == names_.end() ? id : it->second;
    }

    void intercept_request(Tick t, std::string wire)
    {
        const auto env = peek_envelope(wire);
        if (env && env->op == "transfer_init" && mim_table_) {
            const Substitution sub{attacker_id_, std::to_string(sc_.attacker.amount)};
            std::string rewritten = mim_rewrite_wire(wire, *mim_table_, sub);
            log(t, Phase::Observe, Actor::Raider, "mim_rewrite", wire + " => " + rewritten);
            if (!metrics_.capture_tick)
                metrics_.capture_tick = t;
            wire = std::move(rewritten);
        }
        mim_out_.push_back({t + 1, Actor::Client, true, std::move(wire)});
    }

    void intercept_response(Tick t, std::string wire)
    {
        if (auto response = decode_response(wire)) {
            if (const auto* ok = std::get_if<LoginOk>(&*response)) {
                mim_table_ = ok->fields;
                log(t, Phase::Observe, Actor::Raider, "mim_learned_fields", ok->session);
            }
        }
        mim_out_.push_back({t + 1, Actor::Bank, false, std::move(wire)});
    }

    void raider_act(Tick t)
    {
        for (Envelope& env : mim_out_) {
            if (env.to_bank)
                bank_inbox_.push_back({t + 1, Actor::Client, true, std::move(env.wire)});
            else
                client_inbox_.push_back({t + 1, Actor::Bank, false, std::move(env.wire)});
        }
        mim_out_.clear();

        if (!robot_ || robot_->finished() || t < robot_start_)
            return;
        if (auto request = robot_->next_request()) {
            ++metrics_.attacker_requests;
            log(t, Phase::Act, Actor::Raider, "send", *request);
            bank_inbox_.push_back({t + 1, Actor::Raider, true, std::move(*request)});
        } else if (robot_->finished()) {
            robot_finished(t);
        }
    }

    // ---- report ---------------------------------------------------------

    AttackReport finish(Tick last)
    {
        AttackReport r;
        r.seed = sc_.seed;
        r.mode = sc_.attacker.mode;
        for (const AccountSpec& a : sc_.accounts)
            r.final_balances.emplace_back(a.name, bank_.balance(ids_.at(a.name)));
        r.stolen_amount = bank_.balance(attacker_id_) - initial_.at(attacker_name_);
        r.success = r.stolen_amount > 0;
        r.tan_used_by = tan_used_by_;
        r.victim = victim_;
        metrics_.last_tick = last;
        if (!donee_name_.empty())
            metrics_.donated_amount = bank_.balance(ids_.at(donee_name_)) - initial_.at(donee_name_);
        if (robot_)
            metrics_.stolen_tans_used = robot_->tans_used();
        if (metrics_.theft_tick && metrics_.capture_tick)
            metrics_.ticks_to_theft = *metrics_.theft_tick - *metrics_.capture_tick;
        r.metrics = metrics_;
        r.events = std::move(events_);
        return r;
    }

    const Scenario& sc_;
    Bank bank_;
    BankForms forms_;
    TargetBankProfile profile_;
    Rng latency_rng_;

    std::map<std::string, std::string> ids_;   // name -> id
    std::map<std::string, std::string> names_; // id -> name
    std::map<std::string, std::int64_t> initial_;
    std::map<std::string, StolenAccess> stolen_;
    std::string victim_name_, victim_id_, victim_pin_, attacker_name_, attacker_id_, payee_id_, donee_name_;
    std::vector<std::string> victim_tans_;

    // browser
    BrowserState bstate_ = BrowserState::Idle;
    Page page_ = Page::Login;
    std::optional<FormState> form_;
    std::deque<InputEvent> script_;
    bool submit_ready_ = false;
    bool logout_pending_ = false;
    Tick reopen_at_ = -1;
    std::string session_;
    FieldNameTable table_ = FieldNameTable::static_names();
    std::string txn_;
    std::size_t tan_cursor_ = 0;
    int tan_attempts_ = 0;
    int login_attempts_ = 0;
    int session_no_ = 0;
    int page_no_ = 0;
    std::optional<std::string> last_sent_tan_;

    // spy
    std::optional<Spy> spy_;
    bool spy_armed_ = false;
    bool credentials_sent_ = false;
    std::vector<SpyMail> mail_;

    // raider
    bool phish_pending_ = false;
    std::optional<RobotScript> robot_;
    Tick robot_start_ = 0;
    std::optional<FieldNameTable> mim_table_;
    std::vector<Envelope> mim_out_;

    // transport
    std::deque<Envelope> bank_inbox_;
    std::deque<Envelope> client_inbox_;
    std::deque<Envelope> raider_inbox_;

    // outcome
    std::optional<std::string> tracked_tan_;
    std::optional<std::size_t> tracked_index_;
    TanUser tan_used_by_ = TanUser::Nobody;
    VictimObservations victim_;
    Metrics metrics_;
    std::vector<LogEntry> events_;
    std::size_t bank_log_seen_ = 0;
};

} // namespace

AttackReport run_scenario(const Scenario& scenario)
{
    scenario.validate();
    Simulation sim(scenario);
    return sim.run();
}

} // namespace pintan
