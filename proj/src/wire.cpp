#include "pintan/wire.hpp"

#include <cstdio>
#include "json.hpp"

#include "pintan/rng.hpp"

namespace pintan {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kFieldCount> kCanonical = {
    "id", "pin", "kind", "to", "amount", "txn", "tan", "old_pin", "new_pin",
};

constexpr std::array<std::string_view, 13> kErrorNames = {
    "AuthFailed",     "AccountLocked",  "ConcurrentDenied", "NoSuchSession",     "TanAlreadyUsed",
    "TanInvalidated", "TanNotNext",     "TanUnknown",       "NoSuchTxn",         "MalformedFields",
    "InsufficientFunds", "NoSuchAccount", "PinRejected",
};

std::string hex6(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf, 6);
}

std::string_view read_kind_name(ReadKind k)
{
    return k == ReadKind::Balance ? "balance" : "standing_orders";
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Pulls exactly the expected string-valued keys out of a request object.
class StrictReader {
public:
    explicit StrictReader(const nlohmann::json& obj) : obj_(obj) {}

    std::optional<std::string> take(const std::string& key)
    {
        auto it = obj_.find(key);
        if (it == obj_.end() || !it->is_string())
            return std::nullopt;
        ++consumed_;
        return it->get<std::string>();
    }

    bool all_consumed() const { return consumed_ == obj_.size(); }

private:
    const nlohmann::json& obj_;
    std::size_t consumed_ = 0;
};

} // namespace

std::string_view canonical_name(Field f)
{
    return kCanonical[static_cast<std::size_t>(f)];
}

FieldNameTable FieldNameTable::static_names()
{
    FieldNameTable t;
    for (std::size_t i = 0; i < kFieldCount; ++i)
        t.names_[i] = std::string(kCanonical[i]);
    return t;
}

FieldNameTable FieldNameTable::randomized(std::uint64_t seed, std::string_view session_token)
{
    FieldNameTable t = static_names();
    const std::uint64_t base = derive_seed(seed, session_token);
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        const auto f = static_cast<Field>(i);
        if (f == Field::Id || f == Field::Pin)
            continue;
        t.names_[i] = std::string(kCanonical[i]) + "_" + hex6(derive_seed(base, kCanonical[i]));
    }
    return t;
}

std::string_view to_string(ErrorCode c)
{
    return kErrorNames[static_cast<std::size_t>(c)];
}

std::optional<ErrorCode> error_code_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kErrorNames.size(); ++i)
        if (kErrorNames[i] == s)
            return static_cast<ErrorCode>(i);
    return std::nullopt;
}

std::string_view op_name(const RequestBody& body)
{
    return std::visit(overloaded{
                          [](const LoginRequest&) { return std::string_view("login"); },
                          [](const ReadRequest&) { return std::string_view("read"); },
                          [](const TransferInitRequest&) { return std::string_view("transfer_init"); },
                          [](const TransferAuthorizeRequest&) { return std::string_view("transfer_authorize"); },
                          [](const ChangePinRequest&) { return std::string_view("change_pin"); },
                          [](const LogoutRequest&) { return std::string_view("logout"); },
                      },
                      body);
}

std::string_view op_name(const Response& response)
{
    return std::visit(overloaded{
                          [](const LoginOk&) { return std::string_view("login_ok"); },
                          [](const ReadOk&) { return std::string_view("read_ok"); },
                          [](const Pending&) { return std::string_view("pending"); },
                          [](const TransferOk&) { return std::string_view("transfer_ok"); },
                          [](const Ack&) { return std::string_view("ack"); },
                          [](const ErrorResponse&) { return std::string_view("error"); },
                      },
                      response);
}

std::string encode_request(const Request& request, const FieldNameTable& table)
{
    ordered_json j;
    j["op"] = op_name(request.body);
    if (!std::holds_alternative<LoginRequest>(request.body))
        j["session"] = request.session;
    auto put = [&](Field f, const std::string& v) { j[table.name(f)] = v; };
    std::visit(overloaded{
                   [&](const LoginRequest& r) {
                       put(Field::Id, r.id);
                       put(Field::Pin, r.pin);
                   },
                   [&](const ReadRequest& r) { put(Field::ReadKind, std::string(read_kind_name(r.kind))); },
                   [&](const TransferInitRequest& r) {
                       put(Field::ToAccount, r.to_account);
                       put(Field::Amount, r.amount);
                   },
                   [&](const TransferAuthorizeRequest& r) {
                       put(Field::TxnId, r.txn_id);
                       put(Field::Tan, r.tan);
                   },
                   [&](const ChangePinRequest& r) {
                       put(Field::OldPin, r.old_pin);
                       put(Field::NewPin, r.new_pin);
                   },
                   [&](const LogoutRequest&) {},
               },
               request.body);
    return j.dump();
}

std::optional<Envelope> peek_envelope(std::string_view wire)
{
    const auto j = nlohmann::json::parse(wire, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return std::nullopt;
    auto op = j.find("op");
    if (op == j.end() || !op->is_string())
        return std::nullopt;
    Envelope env{op->get<std::string>(), {}};
    if (auto s = j.find("session"); s != j.end()) {
        if (!s->is_string())
            return std::nullopt;
        env.session = s->get<std::string>();
    }
    return env;
}

std::optional<Request> decode_request(std::string_view wire, const FieldNameTable& table)
{
    const auto j = nlohmann::json::parse(wire, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return std::nullopt;
    StrictReader in(j);
    const auto op = in.take("op");
    if (!op)
        return std::nullopt;

    Request req;
    if (*op != "login") {
        auto session = in.take("session");
        if (!session)
            return std::nullopt;
        req.session = std::move(*session);
    }
    auto field = [&](Field f) { return in.take(table.name(f)); };

    if (*op == "login") {
        auto id = field(Field::Id);
        auto pin = field(Field::Pin);
        if (!id || !pin)
            return std::nullopt;
        req.body = LoginRequest{std::move(*id), std::move(*pin)};
    } else if (*op == "read") {
        auto kind = field(Field::ReadKind);
        if (!kind)
            return std::nullopt;
        if (*kind == "balance")
            req.body = ReadRequest{ReadKind::Balance};
        else if (*kind == "standing_orders")
            req.body = ReadRequest{ReadKind::StandingOrders};
        else
            return std::nullopt;
    } else if (*op == "transfer_init") {
        auto to = field(Field::ToAccount);
        auto amount = field(Field::Amount);
        if (!to || !amount)
            return std::nullopt;
        req.body = TransferInitRequest{std::move(*to), std::move(*amount)};
    } else if (*op == "transfer_authorize") {
        auto txn = field(Field::TxnId);
        auto tan = field(Field::Tan);
        if (!txn || !tan)
            return std::nullopt;
        req.body = TransferAuthorizeRequest{std::move(*txn), std::move(*tan)};
    } else if (*op == "change_pin") {
        auto old_pin = field(Field::OldPin);
        auto new_pin = field(Field::NewPin);
        if (!old_pin || !new_pin)
            return std::nullopt;
        req.body = ChangePinRequest{std::move(*old_pin), std::move(*new_pin)};
    } else if (*op == "logout") {
        req.body = LogoutRequest{};
    } else {
        return std::nullopt;
    }
    if (!in.all_consumed())
        return std::nullopt;
    return req;
}

std::string encode_response(const Response& response)
{
    ordered_json j;
    j["op"] = op_name(response);
    std::visit(overloaded{
                   [&](const LoginOk& r) {
                       j["session"] = r.session;
                       ordered_json fields = ordered_json::object();
                       for (std::size_t i = 0; i < kFieldCount; ++i) {
                           const auto f = static_cast<Field>(i);
                           fields[std::string(canonical_name(f))] = r.fields.name(f);
                       }
                       j["fields"] = std::move(fields);
                   },
                   [&](const ReadOk& r) { j["payload"] = r.payload; },
                   [&](const Pending& r) { j["txn"] = r.txn_id; },
                   [&](const TransferOk& r) {
                       if (r.ben)
                           j["ben"] = *r.ben;
                   },
                   [&](const Ack&) {},
                   [&](const ErrorResponse& r) { j["code"] = to_string(r.code); },
               },
               response);
    return j.dump();
}

std::optional<Response> decode_response(std::string_view wire)
{
    const auto j = nlohmann::json::parse(wire, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("op") || !j["op"].is_string())
        return std::nullopt;
    const std::string op = j["op"].get<std::string>();
    auto str = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string())
            return std::nullopt;
        return it->get<std::string>();
    };

    if (op == "login_ok") {
        auto session = str("session");
        auto fields = j.find("fields");
        if (!session || fields == j.end() || !fields->is_object())
            return std::nullopt;
        LoginOk ok{*session, FieldNameTable::static_names()};
        for (std::size_t i = 0; i < kFieldCount; ++i) {
            const auto f = static_cast<Field>(i);
            auto it = fields->find(std::string(canonical_name(f)));
            if (it == fields->end() || !it->is_string())
                return std::nullopt;
            ok.fields.set(f, it->get<std::string>());
        }
        return ok;
    }
    if (op == "read_ok") {
        auto p = str("payload");
        if (!p)
            return std::nullopt;
        return ReadOk{*p};
    }
    if (op == "pending") {
        auto t = str("txn");
        if (!t)
            return std::nullopt;
        return Pending{*t};
    }
    if (op == "transfer_ok")
        return TransferOk{str("ben")};
    if (op == "ack")
        return Ack{};
    if (op == "error") {
        auto c = str("code");
        if (!c)
            return std::nullopt;
        auto code = error_code_from_string(*c);
        if (!code)
            return std::nullopt;
        return ErrorResponse{*code};
    }
    return std::nullopt;
}

} // namespace pintan
