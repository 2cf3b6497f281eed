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

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>

// On-disk format of one worker's trace stream (trace_<worker>.tfb):
//
//   offset  size  field
//   0       4     magic "TFB1"
//   4       2     version (1)
//   6       2     record size (24)
//   8       24*n  records
//
// Record layout, all little-endian:
//
//   0   8  timestamp, steady clock nanoseconds
//   8   2  event id
//   10  2  reserved (0)
//   12  4  reserved (0)
//   16  8  payload

namespace taskforge::trace {

enum class EventId : std::uint16_t {
	task_create = 1,
	task_ready = 2,
	task_start = 3,
	task_end = 4,
	sched_enter = 5,
	sched_serve = 6,
	sched_leave = 7,
	deps_deliver = 8,
	buffer_flush = 9,
};

inline const char *event_name(std::uint16_t id) noexcept
{
	switch (static_cast<EventId>(id)) {
		case EventId::task_create:
			return "task_create";
		case EventId::task_ready:
			return "task_ready";
		case EventId::task_start:
			return "task_start";
		case EventId::task_end:
			return "task_end";
		case EventId::sched_enter:
			return "sched_enter";
		case EventId::sched_serve:
			return "sched_serve";
		case EventId::sched_leave:
			return "sched_leave";
		case EventId::deps_deliver:
			return "deps_deliver";
		case EventId::buffer_flush:
			return "buffer_flush";
	}
	return nullptr;
}

inline constexpr std::array<char, 4> file_magic = {'T', 'F', 'B', '1'};
inline constexpr std::uint16_t file_version = 1;
inline constexpr std::size_t record_size = 24;
inline constexpr std::size_t header_size = 8;

struct TraceRecord {
	std::uint64_t timestamp_ns = 0;
	std::uint16_t event = 0;
	std::uint64_t payload = 0;

	bool operator==(const TraceRecord &) const = default;
};

namespace detail {

inline void put_le(unsigned char *out, std::uint64_t value, std::size_t bytes) noexcept
{
	for (std::size_t i = 0; i < bytes; ++i)
		out[i] = static_cast<unsigned char>(value >> (8 * i));
}

inline std::uint64_t get_le(const unsigned char *in, std::size_t bytes) noexcept
{
	std::uint64_t value = 0;
	for (std::size_t i = 0; i < bytes; ++i)
		value |= std::uint64_t{in[i]} << (8 * i);
	return value;
}

} // namespace detail

inline void encode_record(unsigned char *out, const TraceRecord &record) noexcept
{
	detail::put_le(out, record.timestamp_ns, 8);
	detail::put_le(out + 8, record.event, 2);
	detail::put_le(out + 10, 0, 6);
	detail::put_le(out + 16, record.payload, 8);
}

inline TraceRecord decode_record(const unsigned char *in) noexcept
{
	TraceRecord record;
	record.timestamp_ns = detail::get_le(in, 8);
	record.event = static_cast<std::uint16_t>(detail::get_le(in + 8, 2));
	record.payload = detail::get_le(in + 16, 8);
	return record;
}

inline std::array<unsigned char, header_size> encode_header() noexcept
{
	std::array<unsigned char, header_size> header{};
	std::memcpy(header.data(), file_magic.data(), file_magic.size());
	detail::put_le(header.data() + 4, file_version, 2);
	detail::put_le(header.data() + 6, record_size, 2);
	return header;
}

//! Returns a description of the problem, or nullopt for a valid header.
inline std::optional<std::string> check_header(const unsigned char *header, std::size_t available)
{
	if (available < header_size)
		return "truncated header";
	if (std::memcmp(header, file_magic.data(), file_magic.size()) != 0)
		return "bad magic";
	const auto version = detail::get_le(header + 4, 2);
	if (version != file_version)
		return "unsupported version " + std::to_string(version);
	const auto size = detail::get_le(header + 6, 2);
	if (size != record_size)
		return "unexpected record size " + std::to_string(size);
	return std::nullopt;
}

} // namespace taskforge::trace
