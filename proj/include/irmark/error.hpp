/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace irmark {

// Base of every error thrown by the library. `code` is a short stable
// identifier used by the service layer when mapping errors to responses.
class Error : public std::runtime_error
{
public:
	Error(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
	const std::string& code() const noexcept { return code_; }

private:
	std::string code_;
};

class ValidationError : public Error
{
public:
	explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

class CapacityError : public Error
{
public:
	CapacityError(std::size_t required, std::size_t available)
		: Error("capacity", "payload needs " + std::to_string(required) + " bytes but only " +
								std::to_string(available) + " are available"),
		  required_(required), available_(available)
	{}
	std::size_t required() const noexcept { return required_; }
	std::size_t available() const noexcept { return available_; }

private:
	std::size_t required_;
	std::size_t available_;
};

class IoError : public Error
{
public:
	explicit IoError(const std::string& message) : Error("io", message) {}
};

} // namespace irmark
