#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace storycheck {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input (files, DSL text, graphs, rules).
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what) {}
    InputError(const std::string& what, std::vector<std::string> details)
        : Error(what), details_(std::move(details)) {}
    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    std::vector<std::string> details_;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t position)
        : InputError(what + " at offset " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class SyntaxError : public ParseError {
public:
    using ParseError::ParseError;
};

class SortError : public ParseError {
public:
    using ParseError::ParseError;
};

class UnknownName : public InputError {
public:
    using InputError::InputError;
};

class UnknownRuleName : public UnknownName {
public:
    using UnknownName::UnknownName;
};

// Two consecutive transitions do not share their middle state.
class NotComposable : public InputError {
public:
    explicit NotComposable(std::size_t index)
        : InputError("transitions " + std::to_string(index) + " and " + std::to_string(index + 1) +
                     " do not share a state"),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class SourcesDiffer : public InputError {
public:
    SourcesDiffer() : InputError("transitions do not start from the same state") {}
};

class LeftLegNotMono : public InputError {
public:
    LeftLegNotMono() : InputError("left leg of span is not a monomorphism") {}
};

class EventNotInPoset : public InputError {
public:
    using InputError::InputError;
};

class Unconcretizable : public Error {
public:
    explicit Unconcretizable(const std::string& what) : Error(what) {}
};

class BudgetExhausted : public Error {
public:
    explicit BudgetExhausted(std::size_t budget)
        : Error("search budget of " + std::to_string(budget) + " expansions exhausted"),
          budget_(budget) {}
    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t budget_;
};

}  // namespace storycheck
