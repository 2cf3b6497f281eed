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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "taskforge/trace/trace_format.hpp"

namespace taskforge::trace {

inline std::uint64_t now_ns() noexcept
{
	return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
		std::chrono::steady_clock::now().time_since_epoch())
			.count());
}

//! Append-only trace file with the stream header already written.
class TraceFile {
public:
	TraceFile() = default;
	TraceFile(const TraceFile &) = delete;
	TraceFile &operator=(const TraceFile &) = delete;
	~TraceFile() { close(); }

	static std::filesystem::path path_for(const std::filesystem::path &dir, std::size_t worker)
	{
		return dir / ("trace_" + std::to_string(worker) + ".tfb");
	}

	bool open(const std::filesystem::path &path)
	{
		close();
		_file = std::fopen(path.c_str(), "wb");
		if (_file == nullptr)
			return false;
		const auto header = encode_header();
		return write(header.data(), header.size());
	}

	bool write(const unsigned char *data, std::size_t bytes)
	{
		if (_file == nullptr)
			return false;
		return std::fwrite(data, 1, bytes, _file) == bytes;
	}

	void close()
	{
		if (_file != nullptr) {
			std::fclose(_file);
			_file = nullptr;
		}
	}

	bool is_open() const noexcept { return _file != nullptr; }

private:
	std::FILE *_file = nullptr;
};

//! Per-worker circular event buffer made of page-aligned sub-buffers.
//!
//! Only the owning worker emits and flushes, so no synchronization is needed.
//! A sub-buffer becomes flushable once full; when every sub-buffer is waiting
//! for a flush, new events are dropped and counted instead of blocking.
class TraceBuffer {
public:
	static constexpr std::size_t page_size = 4096;
	static constexpr std::size_t default_subbuffer_bytes = 64 * 1024;

	explicit TraceBuffer(std::size_t subbuffers = 32,
		std::size_t subbuffer_bytes = default_subbuffer_bytes)
		: _subbuffer_bytes(round_to_page(subbuffer_bytes)),
		_subbuffers(subbuffers < 2 ? 2 : subbuffers),
		_per_subbuffer(_subbuffer_bytes / record_size),
		_storage(static_cast<unsigned char *>(
			::operator new(_subbuffer_bytes * _subbuffers, std::align_val_t(page_size))))
	{
	}

	TraceBuffer(const TraceBuffer &) = delete;
	TraceBuffer &operator=(const TraceBuffer &) = delete;

	~TraceBuffer() { ::operator delete(_storage, std::align_val_t(page_size)); }

	void emit(EventId event, std::uint64_t payload) noexcept { emit_at(now_ns(), event, payload); }

	void emit_at(std::uint64_t timestamp, EventId event, std::uint64_t payload) noexcept
	{
		++_emitted;
		if (_failed) {
			++_dropped;
			return;
		}
		if (_cursor == _per_subbuffer) {
			if (_filled + 1 - _flushed > _subbuffers - 1) {
				++_dropped;
				return;
			}
			++_filled;
			_cursor = 0;
		}
		unsigned char *slot = _storage + (_filled % _subbuffers) * _subbuffer_bytes
			+ _cursor * record_size;
		encode_record(slot, TraceRecord{timestamp, static_cast<std::uint16_t>(event), payload});
		++_cursor;
	}

	//! True when at least one sub-buffer is full and waiting for a flush.
	bool has_full_subbuffer() const noexcept
	{
		return _filled != _flushed || _cursor == _per_subbuffer;
	}

	//! Writes every full sub-buffer to `file`; with `final` also the partial
	//! one. Returns the number of records written. On a write failure the
	//! unwritten records are counted as dropped and the buffer stops
	//! recording.
	std::size_t flush(TraceFile &file, bool final)
	{
		if (_failed)
			return 0;
		std::size_t written = 0;
		const bool active_full = _cursor == _per_subbuffer;
		const std::uint64_t end = _filled + (active_full ? 1 : 0);
		for (std::uint64_t index = _flushed; index < end; ++index) {
			if (!write_subbuffer(file, index, _per_subbuffer, written))
				return written;
		}
		if (active_full) {
			_filled = end;
			_cursor = 0;
		}
		_flushed = _filled;
		if (final && _cursor > 0) {
			if (!write_subbuffer(file, _filled, _cursor, written))
				return written;
			_cursor = 0;
		}
		return written;
	}

	std::uint64_t emitted() const noexcept { return _emitted; }
	std::uint64_t persisted() const noexcept { return _persisted; }
	std::uint64_t dropped() const noexcept { return _dropped; }
	bool failed() const noexcept { return _failed; }
	std::size_t records_per_subbuffer() const noexcept { return _per_subbuffer; }
	std::size_t subbuffer_count() const noexcept { return _subbuffers; }

	//! Records still held in memory.
	std::uint64_t buffered() const noexcept
	{
		return (_filled - _flushed) * _per_subbuffer + _cursor;
	}

private:
	static std::size_t round_to_page(std::size_t bytes) noexcept
	{
		if (bytes < page_size)
			return page_size;
		return (bytes + page_size - 1) / page_size * page_size;
	}

	bool write_subbuffer(TraceFile &file, std::uint64_t index, std::size_t records,
		std::size_t &written)
	{
		const unsigned char *base = _storage + (index % _subbuffers) * _subbuffer_bytes;
		if (file.write(base, records * record_size)) {
			_persisted += records;
			written += records;
			return true;
		}
		std::fprintf(stderr, "taskforge: trace write failed, disabling tracing for this worker\n");
		_dropped += buffered();
		_failed = true;
		_filled = _flushed = 0;
		_cursor = 0;
		return false;
	}

	std::size_t _subbuffer_bytes;
	std::size_t _subbuffers;
	std::size_t _per_subbuffer;
	unsigned char *_storage;
	std::uint64_t _filled = 0;
	std::uint64_t _flushed = 0;
	std::size_t _cursor = 0;
	std::uint64_t _emitted = 0;
	std::uint64_t _persisted = 0;
	std::uint64_t _dropped = 0;
	bool _failed = false;
};

} // namespace taskforge::trace
