#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pintan/bank.hpp"
#include "pintan/raider.hpp"
#include "pintan/spy.hpp"
#include "pintan/user.hpp"

namespace pintan {

/// Raised for an unusable scenario; `path` names the offending field, e.g.
/// "accounts[2].balance".
class ScenarioInvalid : public std::runtime_error {
public:
    ScenarioInvalid(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path))
    {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class AccountRole { Victim, Attacker, Payee, Compromised, Bystander };
std::string_view to_string(AccountRole r);

struct AccountSpec {
    std::string name;
    AccountRole role = AccountRole::Bystander;
    std::int64_t balance = 0;
    std::size_t tan_count = 100;
    std::size_t stolen_tans = 0; // TANs of this account already held by the attacker
    std::optional<std::string> id;
    std::optional<std::string> pin;
};

/// The transfer the victim sets out to make.
struct VictimIntent {
    std::string to; // account name
    std::int64_t amount = 250;
};

struct Scenario {
    std::vector<AccountSpec> accounts;
    ServerPolicy policy;
    BehaviorProfile behavior;
    VictimIntent intent;
    AttackerConfig attacker; // attacker_account holds an account name
    CredentialFormat format;
    std::uint64_t seed = 0;
    Tick max_ticks = 2000;

    /// Victim, payee, attacker; every configurable flaw present; natural
    /// typing; robot latency 5, re-login delay 50 (illustrative values).
    static Scenario baseline(std::uint64_t seed = 0);

    void validate() const;
    const AccountSpec* find(AccountRole role) const;
    const AccountSpec* find(std::string_view name) const;
};

enum class Phase { Observe, Act };
enum class Actor { User, Spy, Client, Bank, Raider };
std::string_view to_string(Phase p);
std::string_view to_string(Actor a);

/// Position of an actor within a phase: observe runs user, spy, client,
/// bank, raider; act runs the reverse.
int phase_rank(Phase phase, Actor actor);

struct LogEntry {
    Tick tick = 0;
    Phase phase = Phase::Observe;
    Actor actor = Actor::User;
    std::string event;
    std::string payload;

    bool operator==(const LogEntry&) const = default;
};

enum class TanUser { Attacker, Victim, Nobody };
std::string_view to_string(TanUser u);

struct VictimObservations {
    bool browser_crashed = false;
    bool saw_tan_already_used = false;
    bool saw_other_tan_error = false;
    bool received_ben = false;
    bool transfer_completed = false;
    bool saw_account_locked = false;
    bool login_denied = false;
    std::vector<std::string> errors;
};

struct Metrics {
    std::optional<Tick> capture_tick;
    std::optional<Tick> theft_tick;
    std::optional<Tick> ticks_to_theft;
    std::optional<Tick> relogin_tick;
    std::size_t attacker_requests = 0;
    std::size_t stolen_tans_used = 0;
    std::int64_t donated_amount = 0;
    bool spy_killed_browser = false;
    std::optional<std::string> robot_error;
    Tick last_tick = 0;
};

struct AttackReport {
    std::uint64_t seed = 0;
    AttackMode mode = AttackMode::KillAndSteal;
    bool success = false;
    std::int64_t stolen_amount = 0;
    TanUser tan_used_by = TanUser::Nobody;
    VictimObservations victim;
    Metrics metrics;
    std::vector<std::pair<std::string, std::int64_t>> final_balances; // by account name
    std::vector<LogEntry> events;
};

/// Deterministic in the scenario (including its seed). Throws ScenarioInvalid.
AttackReport run_scenario(const Scenario& scenario);

} // namespace pintan
