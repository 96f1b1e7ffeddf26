#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pintan/domain.hpp"
#include "pintan/rng.hpp"
#include "pintan/wire.hpp"

namespace pintan {

enum class ConcurrentSessions { Allowed, Denied };
enum class FieldNaming { Static, PerSessionRandomized };

struct AbortPolicy {
    enum class Kind { Ignore, LockAccount };
    Kind kind = Kind::Ignore;
    Tick timeout_ticks = 0;

    static AbortPolicy ignore() { return {}; }
    static AbortPolicy lock_account(Tick timeout) { return {Kind::LockAccount, timeout}; }

    bool operator==(const AbortPolicy&) const = default;
};

/// Server-side toggles. Each flaw the bank can have is one field; the
/// opposite setting is the mitigation.
struct ServerPolicy {
    TanPolicy tan_policy;
    ConcurrentSessions concurrent_sessions = ConcurrentSessions::Allowed;
    AbortPolicy abort_policy;
    bool ben_enabled = true;
    FieldNaming field_names = FieldNaming::Static;
    unsigned login_lockout_threshold = 3;
    Tick session_timeout_ticks = 300;

    /// Every configurable flaw present.
    static ServerPolicy baseline_flawed();
    /// LockAccount{10}, Denied, PerSessionRandomized.
    static ServerPolicy hardened();

    bool operator==(const ServerPolicy&) const = default;
};

std::string_view to_string(ConcurrentSessions c);
std::string_view to_string(FieldNaming f);

struct PendingTransfer {
    std::string to_account;
    std::int64_t amount = 0;
    Tick created = 0;
};

struct AccountState {
    Credentials credentials;
    std::int64_t balance = 0;
    std::vector<std::string> standing_orders;
    std::set<std::string> sessions;
    std::map<std::string, PendingTransfer> pending_transfers;
    bool locked = false;
    unsigned failed_logins = 0;
};

enum class BankEventKind {
    LoginAccepted,
    LoginRejected,
    AccountLocked,
    SessionOpened,
    SessionClosed,
    SessionExpired,
    TransferPending,
    TanAccepted,
    TanRejected,
    Debit,
    Credit,
    PinChanged,
};

std::string_view to_string(BankEventKind k);

/// Bank-side audit trail. `request` is the sequence number of the request
/// that caused the entry (0 for sweeps).
struct BankEvent {
    std::uint64_t request = 0;
    Tick tick = 0;
    std::string account;
    BankEventKind kind = BankEventKind::LoginAccepted;
    std::string detail;
    std::int64_t amount = 0;
};

/// The bank server state machine. Value type: copying a Bank forks the
/// whole server state.
class Bank {
public:
    explicit Bank(ServerPolicy policy, std::uint64_t seed = 0);

    void add_account(Credentials credentials, std::int64_t balance, std::vector<std::string> standing_orders = {});

    /// Typed entry point. Runs tick_sweep(now) first.
    Response handle_request(const Request& request, Tick now);
    /// Wire entry point: decodes against the session's field table.
    std::string handle_wire(std::string_view request, Tick now);

    /// Expires idle sessions; under LockAccount locks accounts holding an
    /// unauthorized pending transfer older than the timeout.
    void tick_sweep(Tick now);

    const ServerPolicy& policy() const { return policy_; }
    const AccountState* account(std::string_view id) const;
    std::int64_t balance(std::string_view id) const;
    std::int64_t total_balance() const;
    std::vector<std::string> account_ids() const;
    std::size_t live_sessions(std::string_view id) const;
    std::optional<FieldNameTable> session_fields(std::string_view token) const;
    const std::vector<BankEvent>& log() const { return log_; }
    std::uint64_t requests_handled() const { return request_seq_; }

private:
    Response login(const LoginRequest& req, Tick now);
    Response authorize(AccountState& acct, const TransferAuthorizeRequest& req, Tick now);
    void record(Tick now, const std::string& account, BankEventKind kind, std::string detail = {},
                std::int64_t amount = 0);
    void close_session(const std::string& token);
    std::string next_token();

    ServerPolicy policy_;
    std::uint64_t seed_;
    Rng rng_;
    std::map<std::string, AccountState, std::less<>> accounts_;

    struct Session {
        std::string account;
        Tick last_activity = 0;
        FieldNameTable fields;
    };
    std::map<std::string, Session, std::less<>> sessions_;
    std::uint64_t next_txn_ = 1;
    std::uint64_t request_seq_ = 0;
    std::vector<BankEvent> log_;
};

} // namespace pintan
