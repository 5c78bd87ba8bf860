#include "sketchsci/error.hpp"

namespace sketchsci {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::structural: return "structural";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::io: return "io";
    case ErrorCode::invalid_arguments: return "invalid_arguments";
    case ErrorCode::exhausted: return "exhausted";
    case ErrorCode::schema: return "schema";
    case ErrorCode::inconsistency: return "inconsistency";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::stale_reference: return "stale_reference";
    case ErrorCode::empty_selection: return "empty_selection";
    case ErrorCode::untrainable_target: return "untrainable_target";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::no_prediction: return "no_prediction";
    case ErrorCode::cycle: return "cycle";
    case ErrorCode::task_role: return "task_role";
    case ErrorCode::index: return "index";
    case ErrorCode::busy: return "busy";
    case ErrorCode::not_found: return "not_found";
    }
    return "unknown";
}

} // namespace sketchsci
