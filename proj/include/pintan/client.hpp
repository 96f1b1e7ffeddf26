#pragma once

#include <string>

#include "pintan/domain.hpp"
#include "pintan/formfill.hpp"
#include "pintan/wire.hpp"

namespace pintan {

inline constexpr const char* kIdField = "id";
inline constexpr const char* kPinField = "pin";
inline constexpr const char* kToField = "to_account";
inline constexpr const char* kAmountField = "amount";
inline constexpr const char* kTanField = "tan";

enum class Page { Login, Transfer, Tan };
std::string_view to_string(Page p);

/// The three pages of an online-banking session: login, transfer data, TAN.
struct BankForms {
    FormSchema login;
    FormSchema transfer;
    FormSchema tan;

    static BankForms standard(const CredentialFormat& format = {});
    const FormSchema& page(Page p) const;
    /// ID, PIN and TAN on one form.
    static FormSchema credential_form(const CredentialFormat& format = {});
};

// The browser posts whatever the form holds: credentials travel unaltered.
Request login_request(const FormResult& form);
Request transfer_init_request(const std::string& session, const FormResult& form);
Request transfer_authorize_request(const std::string& session, const std::string& txn_id, const FormResult& form);

} // namespace pintan
