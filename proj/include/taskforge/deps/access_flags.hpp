// Copyright 2026 The TaskForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <string>

namespace taskforge::deps {

//! Monotone state word of one data access. Bits are only ever added.
class AccessFlags {
public:
	using bits_type = std::uint16_t;

	static constexpr bits_type read_satisfied = 1u << 0;
	static constexpr bits_type write_satisfied = 1u << 1;
	static constexpr bits_type completed = 1u << 2;
	static constexpr bits_type child_completed = 1u << 3;
	static constexpr bits_type successor_linked = 1u << 4;
	static constexpr bits_type child_linked = 1u << 5;
	static constexpr bits_type parent_sealed = 1u << 6;
	static constexpr bits_type ack_successor = 1u << 7;
	static constexpr bits_type ack_child = 1u << 8;
	static constexpr bits_type ack_parent = 1u << 9;

	//! Size of the flag universe; also the per-access delivery bound.
	static constexpr unsigned universe_size = 10;
	static constexpr bits_type universe = (1u << universe_size) - 1;

	constexpr AccessFlags() noexcept = default;
	constexpr AccessFlags(bits_type bits) noexcept : _bits(bits) {}

	constexpr bits_type bits() const noexcept { return _bits; }
	constexpr bool empty() const noexcept { return _bits == 0; }
	constexpr unsigned count() const noexcept { return std::popcount(_bits); }

	//! True when every bit of `subset` is present.
	constexpr bool has(AccessFlags subset) const noexcept
	{
		return (_bits & subset._bits) == subset._bits;
	}

	constexpr bool intersects(AccessFlags other) const noexcept
	{
		return (_bits & other._bits) != 0;
	}

	constexpr AccessFlags operator|(AccessFlags other) const noexcept
	{
		return AccessFlags(static_cast<bits_type>(_bits | other._bits));
	}
	constexpr AccessFlags operator&(AccessFlags other) const noexcept
	{
		return AccessFlags(static_cast<bits_type>(_bits & other._bits));
	}
	constexpr AccessFlags without(AccessFlags other) const noexcept
	{
		return AccessFlags(static_cast<bits_type>(_bits & ~other._bits));
	}

	constexpr bool operator==(const AccessFlags &) const noexcept = default;

	std::string to_string() const
	{
		static constexpr const char *names[universe_size] = {"READ_SAT", "WRITE_SAT",
			"COMPLETED", "CHILD_COMPLETED", "SUCCESSOR_LINKED", "CHILD_LINKED",
			"PARENT_SEALED", "ACK_SUCCESSOR", "ACK_CHILD", "ACK_PARENT"};
		std::string out = "{";
		for (unsigned i = 0; i < universe_size; ++i) {
			if (_bits & (1u << i)) {
				if (out.size() > 1)
					out += ',';
				out += names[i];
			}
		}
		return out + "}";
	}

private:
	bits_type _bits = 0;
};

} // namespace taskforge::deps
