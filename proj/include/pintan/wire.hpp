#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace pintan {

/// Logical form variables carried by requests. Their on-the-wire names come
/// from a FieldNameTable.
enum class Field : std::size_t { Id, Pin, ReadKind, ToAccount, Amount, TxnId, Tan, OldPin, NewPin };
inline constexpr std::size_t kFieldCount = 9;

std::string_view canonical_name(Field f);

/// Maps each logical field to the variable name the bank expects.
class FieldNameTable {
public:
    /// The constant table every session sees when names are static.
    static FieldNameTable static_names();
    /// Names derived from a session token. Login fields stay canonical since
    /// no session exists when the login form is posted.
    static FieldNameTable randomized(std::uint64_t seed, std::string_view session_token);

    const std::string& name(Field f) const { return names_[static_cast<std::size_t>(f)]; }
    void set(Field f, std::string name) { names_[static_cast<std::size_t>(f)] = std::move(name); }

    bool operator==(const FieldNameTable&) const = default;

private:
    std::array<std::string, kFieldCount> names_;
};

enum class ReadKind { Balance, StandingOrders };

struct LoginRequest {
    std::string id;
    std::string pin;
    bool operator==(const LoginRequest&) const = default;
};
struct ReadRequest {
    ReadKind kind = ReadKind::Balance;
    bool operator==(const ReadRequest&) const = default;
};
struct TransferInitRequest {
    std::string to_account;
    std::string amount; // digits, minor units
    bool operator==(const TransferInitRequest&) const = default;
};
struct TransferAuthorizeRequest {
    std::string txn_id;
    std::string tan;
    bool operator==(const TransferAuthorizeRequest&) const = default;
};
struct ChangePinRequest {
    std::string old_pin;
    std::string new_pin;
    bool operator==(const ChangePinRequest&) const = default;
};
struct LogoutRequest {
    bool operator==(const LogoutRequest&) const = default;
};

using RequestBody = std::variant<LoginRequest, ReadRequest, TransferInitRequest, TransferAuthorizeRequest,
                                 ChangePinRequest, LogoutRequest>;

struct Request {
    std::string session; // empty for Login
    RequestBody body;
    bool operator==(const Request&) const = default;
};

enum class ErrorCode {
    AuthFailed,
    AccountLocked,
    ConcurrentDenied,
    NoSuchSession,
    TanAlreadyUsed,
    TanInvalidated,
    TanNotNext,
    TanUnknown,
    NoSuchTxn,
    MalformedFields,
    InsufficientFunds,
    NoSuchAccount,
    PinRejected,
};

std::string_view to_string(ErrorCode c);
std::optional<ErrorCode> error_code_from_string(std::string_view s);

struct LoginOk {
    std::string session;
    FieldNameTable fields; // the form layout served with the session's pages
    bool operator==(const LoginOk&) const = default;
};
struct ReadOk {
    std::string payload;
    bool operator==(const ReadOk&) const = default;
};
struct Pending {
    std::string txn_id;
    bool operator==(const Pending&) const = default;
};
struct TransferOk {
    std::optional<std::string> ben;
    bool operator==(const TransferOk&) const = default;
};
struct Ack {
    bool operator==(const Ack&) const = default;
};
struct ErrorResponse {
    ErrorCode code = ErrorCode::MalformedFields;
    bool operator==(const ErrorResponse&) const = default;
};

using Response = std::variant<LoginOk, ReadOk, Pending, TransferOk, Ack, ErrorResponse>;

std::string_view op_name(const RequestBody& body);
std::string_view op_name(const Response& response);

/// Envelope keys ("op", "session") are fixed; payload keys come from the table.
/// Output key order is fixed, so encoding is byte-stable.
std::string encode_request(const Request& request, const FieldNameTable& table);

struct Envelope {
    std::string op;
    std::string session;
};
std::optional<Envelope> peek_envelope(std::string_view wire);

/// Strict decode: unknown, missing or non-string keys yield nullopt.
std::optional<Request> decode_request(std::string_view wire, const FieldNameTable& table);

std::string encode_response(const Response& response);
std::optional<Response> decode_response(std::string_view wire);

inline bool is_error(const Response& r, ErrorCode code)
{
    const auto* e = std::get_if<ErrorResponse>(&r);
    return e != nullptr && e->code == code;
}

} // namespace pintan
