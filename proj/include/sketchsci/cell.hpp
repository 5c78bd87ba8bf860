#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <variant>

namespace sketchsci {

struct Empty {
    friend bool operator==(Empty, Empty) = default;
    friend auto operator<=>(Empty, Empty) = default;
};

/// The "?" marker: the value exists but is unknown.
struct Missing {
    friend bool operator==(Missing, Missing) = default;
    friend auto operator<=>(Missing, Missing) = default;
};

enum class TypeTag { numeric, textual, boolean, mixed };

std::string_view to_string(TypeTag tag);

class CellValue {
public:
    CellValue() = default;
    CellValue(Empty) {}
    CellValue(Missing m) : value_(m) {}
    CellValue(double number);
    CellValue(int number) : CellValue(static_cast<double>(number)) {}
    CellValue(std::string text) : value_(std::move(text)) {}
    CellValue(const char* text) : value_(std::string(text)) {}
    CellValue(bool flag) : value_(flag) {}

    static CellValue missing() { return CellValue(Missing{}); }

    bool is_empty() const { return std::holds_alternative<Empty>(value_); }
    bool is_missing() const { return std::holds_alternative<Missing>(value_); }
    bool is_number() const { return std::holds_alternative<double>(value_); }
    bool is_text() const { return std::holds_alternative<std::string>(value_); }
    bool is_bool() const { return std::holds_alternative<bool>(value_); }
    /// Neither Empty nor Missing.
    bool is_observed() const { return !is_empty() && !is_missing(); }

    double number() const { return std::get<double>(value_); }
    const std::string& text() const { return std::get<std::string>(value_); }
    bool flag() const { return std::get<bool>(value_); }

    /// Type of an observed value; Empty and Missing have no type.
    TypeTag type() const;

    /// Human-readable rendering: numbers in shortest round-trip form
    /// (integers without a fraction), "?" for Missing, "" for Empty.
    std::string display() const;

    friend bool operator==(const CellValue&, const CellValue&) = default;
    friend std::strong_ordering operator<=>(const CellValue& a, const CellValue& b);

private:
    std::variant<Empty, Missing, double, std::string, bool> value_;
};

/// Trim, then classify: "?" Missing, "" Empty, decimal number, true/false, text.
CellValue infer_cell_value(std::string_view raw);

std::string format_number(double value);

} // namespace sketchsci
