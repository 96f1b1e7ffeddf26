#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pintan/bank.hpp"
#include "pintan/spy.hpp"
#include "pintan/user.hpp"
#include "pintan/wire.hpp"

namespace pintan {

enum class AttackMode { KillAndSteal, SessionSniper, Phishing, MIM };
std::string_view to_string(AttackMode m);

/// Stolen credentials as they arrive at the collector.
struct ExfiltrationRecord {
    std::string id;
    std::string pin;
    std::string tan;
    std::optional<std::string> to_account;
    std::optional<std::string> amount;
    Tick capture_tick = 0;
    std::string victim;
    AttackMode mode = AttackMode::KillAndSteal;

    bool operator==(const ExfiltrationRecord&) const = default;
};

/// Only complete extractions become records.
std::optional<ExfiltrationRecord> make_record(const ExtractionResult& extraction, Tick capture_tick,
                                              std::string victim, AttackMode mode);

std::string to_json(const ExfiltrationRecord& record);

struct AttackerConfig {
    AttackMode mode = AttackMode::KillAndSteal;
    TickDistribution robot_latency = TickDistribution::constant(5);
    std::string attacker_account;
    std::int64_t amount = 5000;
    std::size_t obfuscation_hops = 0;
    double donation_fraction = 0.0;
    double gullibility = 1.0;
    SpyTier spy_tier = SpyTier::Blind;
    bool clipboard_visible = false;

    void validate() const;
};

struct PlannedTransfer {
    std::string from;
    std::string to;
    std::int64_t amount = 0;
    bool operator==(const PlannedTransfer&) const = default;
};

/// Login data and unused TANs the attacker holds for one account.
struct StolenAccess {
    std::string id;
    std::string pin;
    std::vector<std::string> tans;
};

/// Scripted robot: Login, TransferInit, TransferAuthorize, Logout per
/// planned transfer, encoded with a fixed field-name snapshot. It never
/// reads the served form, which is what static names make possible.
class RobotScript {
public:
    /// With `hold_for_tan` the script waits at the Authorize step until a TAN
    /// is supplied through add_tan() instead of giving up.
    RobotScript(std::vector<PlannedTransfer> plan, std::map<std::string, StolenAccess> access,
                FieldNameTable snapshot, bool hold_for_tan = false);

    void add_tan(const std::string& account, std::string tan);
    bool waiting_for_tan() const;

    /// Next request to send, or nullopt when the script has ended.
    std::optional<std::string> next_request();
    void on_response(std::string_view wire);

    bool finished() const { return finished_; }
    bool succeeded() const { return finished_ && !error_; }
    std::optional<ErrorCode> error() const { return error_; }
    std::size_t transfers_done() const { return done_; }
    std::size_t tans_used() const { return tans_used_; }
    const std::vector<std::string>& presented_tans() const { return presented_; }

private:
    enum class Step { Login, Init, Authorize, Logout };

    std::vector<PlannedTransfer> plan_;
    std::map<std::string, StolenAccess> access_;
    std::map<std::string, std::size_t> tan_cursor_;
    FieldNameTable snapshot_;
    bool hold_for_tan_ = false;
    std::size_t current_ = 0;
    Step step_ = Step::Login;
    bool awaiting_ = false;
    bool finished_ = false;
    std::optional<ErrorCode> error_;
    std::string session_;
    std::string txn_;
    std::size_t done_ = 0;
    std::size_t tans_used_ = 0;
    std::vector<std::string> presented_;
};

struct RobotOutcome {
    bool success = false;
    std::optional<ErrorCode> error;
    Tick finished_at = 0;
};

/// Runs the robot synchronously against `bank`, one request per tick from `now`.
RobotOutcome execute_robot(const ExfiltrationRecord& record, Bank& bank, const TargetBankProfile& profile,
                           const std::string& attacker_account, std::int64_t amount, Tick now);

struct PlanInfeasible {
    std::string reason;
};

struct Donation {
    double fraction = 0.0;
    std::string donee;
};

using HopPlan = std::variant<std::vector<PlannedTransfer>, PlanInfeasible>;

/// Path victim -> c1 -> ... -> c_hops -> attacker through distinct
/// compromised accounts. `spare_tans` counts stolen TANs per account and must
/// include the victim. With a donation, the last sender also pays
/// floor(amount * fraction) to the donee, which costs it a second TAN.
HopPlan plan_hops(const std::map<std::string, std::size_t>& spare_tans, const std::string& victim,
                  std::int64_t amount, std::size_t hops, const std::string& attacker_account, std::uint64_t seed,
                  const Donation& donation = {});

struct Substitution {
    std::string to_account;
    std::string amount;
};

/// Rewrites transfer data in flight. Throws std::invalid_argument for
/// anything but TransferInit.
Request mim_rewrite(const Request& msg, const Substitution& substitution);
std::string mim_rewrite_wire(std::string_view wire, const FieldNameTable& table, const Substitution& substitution);

struct VictimSecrets {
    std::string victim;
    std::string id;
    std::string pin;
    std::string next_tan;
};

/// With probability `gullibility` the victim hands over ID, PIN and the next
/// TAN to a fake site. No bank session is involved.
std::optional<ExfiltrationRecord> phish(const VictimSecrets& secrets, double gullibility, std::uint64_t seed,
                                        Tick now = 0);

} // namespace pintan
