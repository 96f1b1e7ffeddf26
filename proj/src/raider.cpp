#include "pintan/raider.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace pintan {

std::string_view to_string(AttackMode m)
{
    switch (m) {
    case AttackMode::KillAndSteal: return "kill_and_steal";
    case AttackMode::SessionSniper: return "session_sniper";
    case AttackMode::Phishing: return "phishing";
    case AttackMode::MIM: return "mim";
    }
    return "?";
}

std::optional<ExfiltrationRecord> make_record(const ExtractionResult& extraction, Tick capture_tick,
                                              std::string victim, AttackMode mode)
{
    if (extraction.status != ExtractionStatus::Complete || !extraction.has_credentials())
        return std::nullopt;
    return ExfiltrationRecord{*extraction.id,      *extraction.pin, *extraction.tan,   extraction.to_account,
                              extraction.amount,   capture_tick,    std::move(victim), mode};
}

std::string to_json(const ExfiltrationRecord& record)
{
    nlohmann::ordered_json j;
    j["victim"] = record.victim;
    j["mode"] = to_string(record.mode);
    j["capture_tick"] = record.capture_tick;
    j["id"] = record.id;
    j["pin"] = record.pin;
    j["tan"] = record.tan;
    if (record.to_account)
        j["to_account"] = *record.to_account;
    if (record.amount)
        j["amount"] = *record.amount;
    return j.dump();
}

void AttackerConfig::validate() const
{
    if (robot_latency.min_value() < 1)
        throw DomainError("robot latency must be at least 1 tick");
    if (amount <= 0)
        throw DomainError("attack amount must be positive");
    if (!(donation_fraction >= 0.0 && donation_fraction < 1.0))
        throw DomainError("donation_fraction must be in [0,1)");
    if (!(gullibility >= 0.0 && gullibility <= 1.0))
        throw DomainError("gullibility must be in [0,1]");
}

RobotScript::RobotScript(std::vector<PlannedTransfer> plan, std::map<std::string, StolenAccess> access,
                         FieldNameTable snapshot, bool hold_for_tan)
    : plan_(std::move(plan)), access_(std::move(access)), snapshot_(std::move(snapshot)), hold_for_tan_(hold_for_tan)
{
    finished_ = plan_.empty();
}

void RobotScript::add_tan(const std::string& account, std::string tan)
{
    access_[account].tans.push_back(std::move(tan));
}

bool RobotScript::waiting_for_tan() const
{
    if (finished_ || awaiting_ || step_ != Step::Authorize)
        return false;
    const PlannedTransfer& t = plan_[current_];
    auto it = tan_cursor_.find(t.from);
    const std::size_t cursor = it == tan_cursor_.end() ? 0 : it->second;
    return cursor >= access_.at(t.from).tans.size();
}

std::optional<std::string> RobotScript::next_request()
{
    if (finished_ || awaiting_)
        return std::nullopt;
    const PlannedTransfer& t = plan_[current_];
    const StolenAccess& from = access_.at(t.from);
    Request req;
    switch (step_) {
    case Step::Login: req = Request{{}, LoginRequest{from.id, from.pin}}; break;
    case Step::Init: req = Request{session_, TransferInitRequest{t.to, std::to_string(t.amount)}}; break;
    case Step::Authorize: {
        std::size_t& cursor = tan_cursor_[t.from];
        if (cursor >= from.tans.size()) {
            if (hold_for_tan_)
                return std::nullopt;
            finished_ = true;
            error_ = ErrorCode::TanUnknown;
            return std::nullopt;
        }
        presented_.push_back(from.tans[cursor]);
        req = Request{session_, TransferAuthorizeRequest{txn_, from.tans[cursor++]}};
        ++tans_used_;
        break;
    }
    case Step::Logout: req = Request{session_, LogoutRequest{}}; break;
    }
    awaiting_ = true;
    return encode_request(req, snapshot_);
}

void RobotScript::on_response(std::string_view wire)
{
    if (!awaiting_)
        return;
    awaiting_ = false;
    const auto response = decode_response(wire);
    if (!response) {
        finished_ = true;
        error_ = ErrorCode::MalformedFields;
        return;
    }
    if (const auto* err = std::get_if<ErrorResponse>(&*response); err != nullptr && step_ != Step::Logout) {
        finished_ = true;
        error_ = err->code;
        return;
    }
    switch (step_) {
    case Step::Login:
        session_ = std::get<LoginOk>(*response).session;
        step_ = Step::Init;
        break;
    case Step::Init:
        txn_ = std::get<Pending>(*response).txn_id;
        step_ = Step::Authorize;
        break;
    case Step::Authorize:
        ++done_;
        step_ = Step::Logout;
        break;
    case Step::Logout:
        step_ = Step::Login;
        if (++current_ == plan_.size())
            finished_ = true;
        break;
    }
}

RobotOutcome execute_robot(const ExfiltrationRecord& record, Bank& bank, const TargetBankProfile& profile,
                           const std::string& attacker_account, std::int64_t amount, Tick now)
{
    std::map<std::string, StolenAccess> access{{record.id, StolenAccess{record.id, record.pin, {record.tan}}}};
    RobotScript robot({PlannedTransfer{record.id, attacker_account, amount}}, std::move(access),
                      profile.field_names);
    Tick t = now;
    while (auto request = robot.next_request())
        robot.on_response(bank.handle_wire(*request, t++));
    return RobotOutcome{robot.succeeded(), robot.error(), t};
}

HopPlan plan_hops(const std::map<std::string, std::size_t>& spare_tans, const std::string& victim,
                  std::int64_t amount, std::size_t hops, const std::string& attacker_account, std::uint64_t seed,
                  const Donation& donation)
{
    auto spare = [&](const std::string& acct) {
        auto it = spare_tans.find(acct);
        return it == spare_tans.end() ? std::size_t{0} : it->second;
    };
    if (spare(victim) < 1)
        return PlanInfeasible{"no stolen TAN for the victim account"};

    std::vector<std::string> eligible;
    for (const auto& [acct, count] : spare_tans)
        if (count >= 1 && acct != victim && acct != attacker_account && acct != donation.donee)
            eligible.push_back(acct);
    if (eligible.size() < hops)
        return PlanInfeasible{"only " + std::to_string(eligible.size()) + " intermediate accounts with spare TANs"};

    Rng rng(seed, "raider/hops");
    rng.shuffle(eligible);
    std::vector<std::string> path{victim};
    path.insert(path.end(), eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(hops));

    const bool donate = donation.fraction > 0.0 && !donation.donee.empty();
    const auto donated = donate ? static_cast<std::int64_t>(std::floor(static_cast<double>(amount) * donation.fraction))
                                : std::int64_t{0};
    if (donate && spare(path.back()) < 2)
        return PlanInfeasible{"last sender " + path.back() + " lacks a second TAN for the donation"};

    std::vector<PlannedTransfer> plan;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        plan.push_back({path[i], path[i + 1], amount});
    if (donated > 0)
        plan.push_back({path.back(), donation.donee, donated});
    plan.push_back({path.back(), attacker_account, amount - donated});
    return plan;
}

Request mim_rewrite(const Request& msg, const Substitution& substitution)
{
    if (!std::holds_alternative<TransferInitRequest>(msg.body))
        throw std::invalid_argument("mim_rewrite applies to TransferInit only, got " +
                                    std::string(op_name(msg.body)));
    Request out = msg;
    auto& init = std::get<TransferInitRequest>(out.body);
    init.to_account = substitution.to_account;
    init.amount = substitution.amount;
    return out;
}

std::string mim_rewrite_wire(std::string_view wire, const FieldNameTable& table, const Substitution& substitution)
{
    const auto request = decode_request(wire, table);
    if (!request)
        throw std::invalid_argument("cannot decode intercepted request");
    return encode_request(mim_rewrite(*request, substitution), table);
}

std::optional<ExfiltrationRecord> phish(const VictimSecrets& secrets, double gullibility, std::uint64_t seed, Tick now)
{
    Rng rng(seed, "raider/phish");
    if (!rng.chance(gullibility))
        return std::nullopt;
    return ExfiltrationRecord{secrets.id,  secrets.pin,    secrets.next_tan,    std::nullopt,
                              std::nullopt, now, secrets.victim, AttackMode::Phishing};
}

} // namespace pintan
