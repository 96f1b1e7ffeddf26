#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pintan/domain.hpp"

namespace pintan {

class FormError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Charset { Digits, Any };

struct FieldSpec {
    std::string id;
    std::size_t expected_length = 0; // 0: free length
    Charset charset = Charset::Digits;

    bool operator==(const FieldSpec&) const = default;
};

/// Ordered field list; Tab order equals list order.
class FormSchema {
public:
    FormSchema() = default;
    explicit FormSchema(std::vector<FieldSpec> fields);

    std::span<const FieldSpec> fields() const { return fields_; }
    std::size_t size() const { return fields_.size(); }
    std::optional<std::size_t> index_of(std::string_view id) const;
    const FieldSpec& at(std::size_t i) const { return fields_.at(i); }

    bool operator==(const FormSchema&) const = default;

private:
    std::vector<FieldSpec> fields_;
};

namespace key {
struct Char {
    char c = '0';
    bool operator==(const Char&) const = default;
};
struct Enter {
    bool operator==(const Enter&) const = default;
};
struct Tab {
    bool operator==(const Tab&) const = default;
};
struct Backtab {
    bool operator==(const Backtab&) const = default;
};
struct Del {
    bool operator==(const Del&) const = default;
};
struct Backspace {
    bool operator==(const Backspace&) const = default;
};
struct ArrowLeft {
    bool operator==(const ArrowLeft&) const = default;
};
struct ArrowRight {
    bool operator==(const ArrowRight&) const = default;
};
/// Click into a field. Without a cursor index the caret lands at the end.
struct MouseFocus {
    std::string field_id;
    std::optional<std::size_t> cursor;
    bool operator==(const MouseFocus&) const = default;
};
struct Paste {
    std::string text;
    bool operator==(const Paste&) const = default;
};
struct ClickSubmit {
    bool operator==(const ClickSubmit&) const = default;
};
} // namespace key

using InputAction = std::variant<key::Char, key::Enter, key::Tab, key::Backtab, key::Del, key::Backspace,
                                 key::ArrowLeft, key::ArrowRight, key::MouseFocus, key::Paste, key::ClickSubmit>;

struct InputEvent {
    Tick tick = 0;
    InputAction action;

    bool operator==(const InputEvent&) const = default;
};

std::string describe(const InputAction& action);

enum class Terminator { None, Enter, Submit };
std::string_view to_string(Terminator t);

struct FormResult {
    std::map<std::string, std::string> fields;
    Terminator terminator = Terminator::None;

    const std::string& operator[](const std::string& id) const { return fields.at(id); }
    bool operator==(const FormResult&) const = default;
};

/// Incremental form interpreter. Focus starts on the first field with the
/// caret at position 0.
class FormState {
public:
    explicit FormState(FormSchema schema);

    /// Throws FormError for events after the terminator, unknown field ids
    /// or decreasing ticks.
    void apply(const InputEvent& event);

    bool terminated() const { return terminator_ != Terminator::None; }
    Terminator terminator() const { return terminator_; }
    std::optional<std::size_t> focus() const { return focus_; }
    std::size_t cursor() const { return cursor_; }
    const std::string& content(std::size_t field) const { return contents_.at(field); }
    const FormSchema& schema() const { return schema_; }
    FormResult result() const;

private:
    std::string* focused();

    FormSchema schema_;
    std::vector<std::string> contents_;
    std::optional<std::size_t> focus_;
    std::size_t cursor_ = 0;
    Terminator terminator_ = Terminator::None;
    std::optional<Tick> last_tick_;
};

FormResult replay(const FormSchema& schema, std::span<const InputEvent> events);

} // namespace pintan
