#include "sketchsci/cell.hpp"

#include "sketchsci/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace sketchsci {

std::string_view to_string(TypeTag tag)
{
    switch (tag) {
    case TypeTag::numeric: return "numeric";
    case TypeTag::textual: return "textual";
    case TypeTag::boolean: return "boolean";
    case TypeTag::mixed: return "mixed";
    }
    return "mixed";
}

CellValue::CellValue(double number) : value_(number)
{
    if (!std::isfinite(number))
        throw Error(ErrorCode::validation, "non-finite number in cell");
}

TypeTag CellValue::type() const
{
    if (is_number())
        return TypeTag::numeric;
    if (is_bool())
        return TypeTag::boolean;
    if (is_text())
        return TypeTag::textual;
    return TypeTag::mixed;
}

std::string format_number(double value)
{
    if (value == std::floor(value) && std::fabs(value) < 1e15) {
        auto whole = static_cast<std::int64_t>(value);
        if (whole == 0)
            return "0";
        return std::to_string(whole);
    }
    std::array<char, 64> buffer{};
    auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), end);
}

std::string CellValue::display() const
{
    if (is_empty())
        return "";
    if (is_missing())
        return "?";
    if (is_number())
        return format_number(number());
    if (is_bool())
        return flag() ? "true" : "false";
    return text();
}

std::strong_ordering operator<=>(const CellValue& a, const CellValue& b)
{
    if (a.value_.index() != b.value_.index())
        return a.value_.index() <=> b.value_.index();
    if (a.is_number()) {
        if (a.number() < b.number())
            return std::strong_ordering::less;
        if (a.number() > b.number())
            return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    if (a.is_text())
        return a.text() <=> b.text();
    if (a.is_bool())
        return a.flag() <=> b.flag();
    return std::strong_ordering::equal;
}

namespace {

    std::string_view trim(std::string_view text)
    {
        const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
        while (!text.empty() && is_space(text.front()))
            text.remove_prefix(1);
        while (!text.empty() && is_space(text.back()))
            text.remove_suffix(1);
        return text;
    }

    bool iequals(std::string_view a, std::string_view b)
    {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
            if (lower(a[i]) != lower(b[i]))
                return false;
        }
        return true;
    }

} // namespace

CellValue infer_cell_value(std::string_view raw)
{
    auto text = trim(raw);
    if (text.empty())
        return Empty{};
    if (text == "?")
        return Missing{};

    auto digits = text;
    if (digits.front() == '+')
        digits.remove_prefix(1);
    // from_chars also accepts "inf" and "nan"; require a leading digit or dot.
    const bool numeric_start = !digits.empty()
        && ((digits.front() >= '0' && digits.front() <= '9') || digits.front() == '.' || digits.front() == '-');
    if (numeric_start) {
        double value = 0.0;
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec == std::errc{} && end == digits.data() + digits.size() && std::isfinite(value))
            return value;
    }

    if (iequals(text, "true"))
        return true;
    if (iequals(text, "false"))
        return false;
    return std::string(text);
}

} // namespace sketchsci
