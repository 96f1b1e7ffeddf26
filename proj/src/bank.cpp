#include "pintan/bank.hpp"

#include <cstdio>

namespace pintan {

namespace {

std::optional<std::int64_t> parse_amount(std::string_view s)
{
    if (s.empty() || s.size() > 15 || !is_digit_string(s))
        return std::nullopt;
    std::int64_t v = 0;
    for (char c : s)
        v = v * 10 + (c - '0');
    if (v <= 0)
        return std::nullopt;
    return v;
}

ErrorCode tan_error(TanRejectReason r)
{
    switch (r) {
    case TanRejectReason::AlreadyUsed: return ErrorCode::TanAlreadyUsed;
    case TanRejectReason::Invalidated: return ErrorCode::TanInvalidated;
    case TanRejectReason::NotNext: return ErrorCode::TanNotNext;
    case TanRejectReason::Unknown: return ErrorCode::TanUnknown;
    }
    return ErrorCode::TanUnknown;
}

} // namespace

ServerPolicy ServerPolicy::baseline_flawed()
{
    return ServerPolicy{};
}

ServerPolicy ServerPolicy::hardened()
{
    ServerPolicy p;
    p.abort_policy = AbortPolicy::lock_account(10);
    p.concurrent_sessions = ConcurrentSessions::Denied;
    p.field_names = FieldNaming::PerSessionRandomized;
    return p;
}

std::string_view to_string(ConcurrentSessions c)
{
    return c == ConcurrentSessions::Allowed ? "Allowed" : "Denied";
}

std::string_view to_string(FieldNaming f)
{
    return f == FieldNaming::Static ? "Static" : "PerSessionRandomized";
}

std::string_view to_string(BankEventKind k)
{
    switch (k) {
    case BankEventKind::LoginAccepted: return "LoginAccepted";
    case BankEventKind::LoginRejected: return "LoginRejected";
    case BankEventKind::AccountLocked: return "AccountLocked";
    case BankEventKind::SessionOpened: return "SessionOpened";
    case BankEventKind::SessionClosed: return "SessionClosed";
    case BankEventKind::SessionExpired: return "SessionExpired";
    case BankEventKind::TransferPending: return "TransferPending";
    case BankEventKind::TanAccepted: return "TanAccepted";
    case BankEventKind::TanRejected: return "TanRejected";
    case BankEventKind::Debit: return "Debit";
    case BankEventKind::Credit: return "Credit";
    case BankEventKind::PinChanged: return "PinChanged";
    }
    return "?";
}

Bank::Bank(ServerPolicy policy, std::uint64_t seed) : policy_(policy), seed_(seed), rng_(seed, "bank/tokens") {}

void Bank::add_account(Credentials credentials, std::int64_t balance, std::vector<std::string> standing_orders)
{
    if (balance < 0)
        throw DomainError("negative opening balance");
    std::string id = credentials.id();
    AccountState state{std::move(credentials), balance, std::move(standing_orders), {}, {}, false, 0};
    if (!accounts_.emplace(id, std::move(state)).second)
        throw DomainError("duplicate account id " + id);
}

const AccountState* Bank::account(std::string_view id) const
{
    auto it = accounts_.find(id);
    return it == accounts_.end() ? nullptr : &it->second;
}

std::int64_t Bank::balance(std::string_view id) const
{
    const AccountState* a = account(id);
    if (a == nullptr)
        throw std::out_of_range("no such account");
    return a->balance;
}

std::int64_t Bank::total_balance() const
{
    std::int64_t sum = 0;
    for (const auto& [id, acct] : accounts_)
        sum += acct.balance;
    return sum;
}

std::vector<std::string> Bank::account_ids() const
{
    std::vector<std::string> ids;
    for (const auto& [id, acct] : accounts_)
        ids.push_back(id);
    return ids;
}

std::size_t Bank::live_sessions(std::string_view id) const
{
    const AccountState* a = account(id);
    return a == nullptr ? 0 : a->sessions.size();
}

std::optional<FieldNameTable> Bank::session_fields(std::string_view token) const
{
    auto it = sessions_.find(token);
    if (it == sessions_.end())
        return std::nullopt;
    return it->second.fields;
}

void Bank::record(Tick now, const std::string& account, BankEventKind kind, std::string detail, std::int64_t amount)
{
    log_.push_back({request_seq_, now, account, kind, std::move(detail), amount});
}

std::string Bank::next_token()
{
    for (;;) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_.next()));
        if (!sessions_.contains(std::string_view(buf)))
            return buf;
    }
}

void Bank::close_session(const std::string& token)
{
    auto it = sessions_.find(token);
    if (it == sessions_.end())
        return;
    if (auto acct = accounts_.find(it->second.account); acct != accounts_.end())
        acct->second.sessions.erase(token);
    sessions_.erase(it);
}

void Bank::tick_sweep(Tick now)
{
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (now - it->second.last_activity > policy_.session_timeout_ticks) {
            const std::string token = it->first;
            const std::string acct = it->second.account;
            ++it;
            close_session(token);
            log_.push_back({0, now, acct, BankEventKind::SessionExpired, token, 0});
        } else {
            ++it;
        }
    }

    if (policy_.abort_policy.kind != AbortPolicy::Kind::LockAccount)
        return;
    for (auto& [id, acct] : accounts_) {
        if (acct.locked)
            continue;
        for (const auto& [txn, pending] : acct.pending_transfers) {
            if (now - pending.created > policy_.abort_policy.timeout_ticks) {
                acct.locked = true;
                log_.push_back({0, now, id, BankEventKind::AccountLocked, "abandoned " + txn, 0});
                break;
            }
        }
    }
}

Response Bank::login(const LoginRequest& req, Tick now)
{
    auto it = accounts_.find(req.id);
    if (it == accounts_.end())
        return ErrorResponse{ErrorCode::AuthFailed};
    AccountState& acct = it->second;
    if (acct.locked) {
        record(now, req.id, BankEventKind::LoginRejected, "locked");
        return ErrorResponse{ErrorCode::AccountLocked};
    }
    if (!acct.credentials.authenticates(req.pin)) {
        ++acct.failed_logins;
        record(now, req.id, BankEventKind::LoginRejected, "bad pin");
        if (acct.failed_logins >= policy_.login_lockout_threshold) {
            acct.locked = true;
            record(now, req.id, BankEventKind::AccountLocked, "failed logins");
        }
        return ErrorResponse{ErrorCode::AuthFailed};
    }
    if (policy_.concurrent_sessions == ConcurrentSessions::Denied && !acct.sessions.empty()) {
        record(now, req.id, BankEventKind::LoginRejected, "concurrent");
        return ErrorResponse{ErrorCode::ConcurrentDenied};
    }

    acct.failed_logins = 0;
    std::string token = next_token();
    FieldNameTable fields = policy_.field_names == FieldNaming::Static
                                ? FieldNameTable::static_names()
                                : FieldNameTable::randomized(seed_, token);
    sessions_.emplace(token, Session{req.id, now, fields});
    acct.sessions.insert(token);
    record(now, req.id, BankEventKind::LoginAccepted);
    record(now, req.id, BankEventKind::SessionOpened, token);
    return LoginOk{std::move(token), std::move(fields)};
}

Response Bank::authorize(AccountState& acct, const TransferAuthorizeRequest& req, Tick now)
{
    const std::string& id = acct.credentials.id();
    auto pending_it = acct.pending_transfers.find(req.txn_id);
    if (pending_it == acct.pending_transfers.end())
        return ErrorResponse{ErrorCode::NoSuchTxn};
    const PendingTransfer pending = pending_it->second;
    if (acct.balance < pending.amount)
        return ErrorResponse{ErrorCode::InsufficientFunds};
    auto dest = accounts_.find(pending.to_account);
    if (dest == accounts_.end())
        return ErrorResponse{ErrorCode::NoSuchAccount};

    ConsumeResult result = consume_tan(acct.credentials.tans(), req.tan, policy_.tan_policy);
    if (const auto* rejected = std::get_if<TanRejected>(&result)) {
        record(now, id, BankEventKind::TanRejected, std::string(to_string(rejected->reason)));
        return ErrorResponse{tan_error(rejected->reason)};
    }
    const auto& accepted = std::get<TanAccepted>(result);
    record(now, id, BankEventKind::TanAccepted, std::to_string(accepted.index));

    acct.pending_transfers.erase(pending_it);
    acct.balance -= pending.amount;
    record(now, id, BankEventKind::Debit, req.txn_id, pending.amount);
    dest->second.balance += pending.amount;
    record(now, pending.to_account, BankEventKind::Credit, req.txn_id, pending.amount);

    if (policy_.ben_enabled)
        return TransferOk{accepted.ben};
    return TransferOk{std::nullopt};
}

Response Bank::handle_request(const Request& request, Tick now)
{
    ++request_seq_;
    tick_sweep(now);

    if (const auto* login_req = std::get_if<LoginRequest>(&request.body))
        return login(*login_req, now);

    auto session_it = sessions_.find(request.session);
    if (session_it == sessions_.end())
        return ErrorResponse{ErrorCode::NoSuchSession};
    const std::string account_id = session_it->second.account;
    AccountState& acct = accounts_.at(account_id);
    if (acct.locked)
        return ErrorResponse{ErrorCode::AccountLocked};
    session_it->second.last_activity = now;

    if (const auto* read = std::get_if<ReadRequest>(&request.body)) {
        if (read->kind == ReadKind::Balance)
            return ReadOk{std::to_string(acct.balance)};
        std::string payload;
        for (const std::string& order : acct.standing_orders) {
            if (!payload.empty())
                payload += ';';
            payload += order;
        }
        return ReadOk{payload};
    }
    if (const auto* init = std::get_if<TransferInitRequest>(&request.body)) {
        const auto amount = parse_amount(init->amount);
        if (!amount)
            return ErrorResponse{ErrorCode::MalformedFields};
        if (!accounts_.contains(init->to_account))
            return ErrorResponse{ErrorCode::NoSuchAccount};
        std::string txn = "T" + std::to_string(next_txn_++);
        acct.pending_transfers.emplace(txn, PendingTransfer{init->to_account, *amount, now});
        record(now, account_id, BankEventKind::TransferPending, txn + "->" + init->to_account, *amount);
        return Pending{std::move(txn)};
    }
    if (const auto* auth = std::get_if<TransferAuthorizeRequest>(&request.body))
        return authorize(acct, *auth, now);
    if (const auto* change = std::get_if<ChangePinRequest>(&request.body)) {
        switch (acct.credentials.change_pin(change->old_pin, change->new_pin)) {
        case PinChangeResult::Ok:
            record(now, account_id, BankEventKind::PinChanged);
            return Ack{};
        case PinChangeResult::WrongOld: return ErrorResponse{ErrorCode::AuthFailed};
        case PinChangeResult::BadFormat: return ErrorResponse{ErrorCode::MalformedFields};
        case PinChangeResult::Reused: return ErrorResponse{ErrorCode::PinRejected};
        }
    }
    // Logout
    record(now, account_id, BankEventKind::SessionClosed, request.session);
    close_session(request.session);
    return Ack{};
}

std::string Bank::handle_wire(std::string_view wire, Tick now)
{
    tick_sweep(now);
    const auto env = peek_envelope(wire);
    if (!env) {
        ++request_seq_;
        return encode_response(ErrorResponse{ErrorCode::MalformedFields});
    }
    FieldNameTable table = FieldNameTable::static_names();
    if (env->op != "login") {
        auto it = sessions_.find(env->session);
        if (it == sessions_.end()) {
            ++request_seq_;
            return encode_response(ErrorResponse{ErrorCode::NoSuchSession});
        }
        table = it->second.fields;
    }
    const auto request = decode_request(wire, table);
    if (!request) {
        ++request_seq_;
        return encode_response(ErrorResponse{ErrorCode::MalformedFields});
    }
    return encode_response(handle_request(*request, now));
}

} // namespace pintan
