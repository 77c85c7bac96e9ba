#pragma once

#include <stdexcept>
#include <string>

namespace chaos {

/// Pipeline stage an error originated from. The CLI maps each stage to a
/// distinct exit code.
enum class Stage {
    config,
    ingestion,
    selection,
    entropy,
    detection,
    evaluation,
    generation,
    output,
};

inline const char* to_string(Stage s) {
    switch (s) {
    case Stage::config: return "config";
    case Stage::ingestion: return "ingestion";
    case Stage::selection: return "selection";
    case Stage::entropy: return "entropy";
    case Stage::detection: return "detection";
    case Stage::evaluation: return "evaluation";
    case Stage::generation: return "generation";
    case Stage::output: return "output";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Stage stage, const std::string& what)
        : std::runtime_error(what), stage_(stage) {}

    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

/// Invalid argument to a numerical routine (tau out of range, empty subset, ...).
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what, Stage stage = Stage::config)
        : Error(stage, what) {}
};

/// Malformed or non-finite input data.
class DataError : public Error {
public:
    explicit DataError(const std::string& what, Stage stage = Stage::ingestion)
        : Error(stage, what) {}
};

} // namespace chaos
