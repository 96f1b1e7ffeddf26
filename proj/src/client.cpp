#include "pintan/client.hpp"

namespace pintan {

std::string_view to_string(Page p)
{
    switch (p) {
    case Page::Login: return "login";
    case Page::Transfer: return "transfer";
    case Page::Tan: return "tan";
    }
    return "?";
}

BankForms BankForms::standard(const CredentialFormat& format)
{
    return BankForms{
        FormSchema({{kIdField, format.id_length, Charset::Digits}, {kPinField, format.pin_length, Charset::Digits}}),
        FormSchema({{kToField, format.id_length, Charset::Digits}, {kAmountField, 0, Charset::Digits}}),
        FormSchema({{kTanField, format.tan_length, Charset::Digits}}),
    };
}

const FormSchema& BankForms::page(Page p) const
{
    switch (p) {
    case Page::Login: return login;
    case Page::Transfer: return transfer;
    case Page::Tan: return tan;
    }
    return login;
}

FormSchema BankForms::credential_form(const CredentialFormat& format)
{
    return FormSchema({{kIdField, format.id_length, Charset::Digits},
                       {kPinField, format.pin_length, Charset::Digits},
                       {kTanField, format.tan_length, Charset::Digits}});
}

Request login_request(const FormResult& form)
{
    return Request{{}, LoginRequest{form[kIdField], form[kPinField]}};
}

Request transfer_init_request(const std::string& session, const FormResult& form)
{
    return Request{session, TransferInitRequest{form[kToField], form[kAmountField]}};
}

Request transfer_authorize_request(const std::string& session, const std::string& txn_id, const FormResult& form)
{
    return Request{session, TransferAuthorizeRequest{txn_id, form[kTanField]}};
}

} // namespace pintan
