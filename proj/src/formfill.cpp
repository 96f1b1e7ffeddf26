#include "pintan/formfill.hpp"

#include <set>

namespace pintan {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

FormSchema::FormSchema(std::vector<FieldSpec> fields) : fields_(std::move(fields))
{
    std::set<std::string_view> ids;
    for (const FieldSpec& f : fields_)
        if (!ids.insert(f.id).second)
            throw FormError("duplicate field id " + f.id);
}

std::optional<std::size_t> FormSchema::index_of(std::string_view id) const
{
    for (std::size_t i = 0; i < fields_.size(); ++i)
        if (fields_[i].id == id)
            return i;
    return std::nullopt;
}

std::string describe(const InputAction& action)
{
    return std::visit(overloaded{
                          [](const key::Char& k) { return std::string("char:") + k.c; },
                          [](const key::Enter&) { return std::string("enter"); },
                          [](const key::Tab&) { return std::string("tab"); },
                          [](const key::Backtab&) { return std::string("backtab"); },
                          [](const key::Del&) { return std::string("del"); },
                          [](const key::Backspace&) { return std::string("backspace"); },
                          [](const key::ArrowLeft&) { return std::string("left"); },
                          [](const key::ArrowRight&) { return std::string("right"); },
                          [](const key::MouseFocus& k) {
                              std::string s = "click:" + k.field_id;
                              if (k.cursor)
                                  s += "@" + std::to_string(*k.cursor);
                              return s;
                          },
                          [](const key::Paste& k) { return "paste:" + k.text; },
                          [](const key::ClickSubmit&) { return std::string("submit"); },
                      },
                      action);
}

std::string_view to_string(Terminator t)
{
    switch (t) {
    case Terminator::None: return "None";
    case Terminator::Enter: return "Enter";
    case Terminator::Submit: return "Submit";
    }
    return "?";
}

FormState::FormState(FormSchema schema) : schema_(std::move(schema)), contents_(schema_.size())
{
    if (schema_.size() > 0)
        focus_ = 0;
}

std::string* FormState::focused()
{
    return focus_ ? &contents_[*focus_] : nullptr;
}

void FormState::apply(const InputEvent& event)
{
    if (terminated())
        throw FormError("input event after terminator");
    if (last_tick_ && event.tick < *last_tick_)
        throw FormError("input event ticks must be non-decreasing");
    last_tick_ = event.tick;

    const std::size_t n = schema_.size();
    std::visit(overloaded{
                   [&](const key::Char& k) {
                       if (std::string* s = focused()) {
                           s->insert(s->begin() + static_cast<std::ptrdiff_t>(cursor_), k.c);
                           ++cursor_;
                       }
                   },
                   [&](const key::Paste& k) {
                       if (std::string* s = focused()) {
                           s->insert(cursor_, k.text);
                           cursor_ += k.text.size();
                       }
                   },
                   [&](const key::Backspace&) {
                       std::string* s = focused();
                       if (s != nullptr && cursor_ > 0) {
                           s->erase(cursor_ - 1, 1);
                           --cursor_;
                       }
                   },
                   [&](const key::Del&) {
                       std::string* s = focused();
                       if (s != nullptr && cursor_ < s->size())
                           s->erase(cursor_, 1);
                   },
                   [&](const key::ArrowLeft&) {
                       if (cursor_ > 0)
                           --cursor_;
                   },
                   [&](const key::ArrowRight&) {
                       if (std::string* s = focused(); s != nullptr && cursor_ < s->size())
                           ++cursor_;
                   },
                   [&](const key::Tab&) {
                       if (n == 0)
                           return;
                       focus_ = (*focus_ + 1) % n;
                       cursor_ = contents_[*focus_].size();
                   },
                   [&](const key::Backtab&) {
                       if (n == 0)
                           return;
                       focus_ = (*focus_ + n - 1) % n;
                       cursor_ = contents_[*focus_].size();
                   },
                   [&](const key::MouseFocus& k) {
                       const auto idx = schema_.index_of(k.field_id);
                       if (!idx)
                           throw FormError("focus on unknown field " + k.field_id);
                       focus_ = *idx;
                       const std::size_t len = contents_[*idx].size();
                       cursor_ = k.cursor ? std::min(*k.cursor, len) : len;
                   },
                   [&](const key::Enter&) { terminator_ = Terminator::Enter; },
                   [&](const key::ClickSubmit&) { terminator_ = Terminator::Submit; },
               },
               event.action);
}

FormResult FormState::result() const
{
    FormResult r;
    for (std::size_t i = 0; i < schema_.size(); ++i)
        r.fields.emplace(schema_.at(i).id, contents_[i]);
    r.terminator = terminator_;
    return r;
}

FormResult replay(const FormSchema& schema, std::span<const InputEvent> events)
{
    FormState state(schema);
    for (const InputEvent& e : events)
        state.apply(e);
    return state.result();
}

} // namespace pintan
