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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taskforge/trace/trace_format.hpp"

namespace taskforge::trace {

struct DumpIssue {
	std::filesystem::path file;
	std::uint64_t offset = 0;
	std::string message;
};

struct DumpedRecord {
	TraceRecord record;
	std::size_t worker = 0;
};

struct DumpResult {
	std::vector<DumpedRecord> records;
	std::vector<DumpIssue> issues;
	std::size_t files = 0;
};

namespace detail {

//! Parses "trace_<n>.tfb"; returns false for anything else.
inline bool worker_from_name(const std::string &name, std::size_t &worker)
{
	constexpr std::string_view prefix = "trace_";
	constexpr std::string_view suffix = ".tfb";
	if (name.size() <= prefix.size() + suffix.size() || name.rfind(prefix, 0) != 0
		|| name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
		return false;
	const std::string digits
		= name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
	if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
		return false;
	worker = std::stoul(digits);
	return true;
}

} // namespace detail

//! Reads one stream. Records up to the first defect are kept.
inline void read_trace_file(const std::filesystem::path &path, std::size_t worker, DumpResult &out)
{
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		out.issues.push_back({path, 0, "cannot open"});
		return;
	}
	const std::vector<unsigned char> bytes(
		(std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
	++out.files;
	if (auto problem = check_header(bytes.data(), bytes.size())) {
		out.issues.push_back({path, 0, *problem});
		return;
	}
	std::size_t offset = header_size;
	for (; offset + record_size <= bytes.size(); offset += record_size)
		out.records.push_back({decode_record(bytes.data() + offset), worker});
	if (offset != bytes.size()) {
		out.issues.push_back({path, offset,
			"truncated record (" + std::to_string(bytes.size() - offset) + " of "
				+ std::to_string(record_size) + " bytes)"});
	}
}

//! Loads every trace_<worker>.tfb in `dir` and merges them by timestamp;
//! ties are ordered by worker, then by position in the stream.
inline DumpResult read_trace_dir(const std::filesystem::path &dir)
{
	DumpResult result;
	std::vector<std::pair<std::size_t, std::filesystem::path>> files;
	std::error_code ec;
	for (const auto &entry : std::filesystem::directory_iterator(dir, ec)) {
		std::size_t worker = 0;
		if (entry.is_regular_file() && detail::worker_from_name(entry.path().filename().string(), worker))
			files.emplace_back(worker, entry.path());
	}
	if (ec)
		result.issues.push_back({dir, 0, ec.message()});
	std::sort(files.begin(), files.end());
	for (const auto &[worker, path] : files)
		read_trace_file(path, worker, result);
	std::stable_sort(result.records.begin(), result.records.end(),
		[](const DumpedRecord &a, const DumpedRecord &b) {
			if (a.record.timestamp_ns != b.record.timestamp_ns)
				return a.record.timestamp_ns < b.record.timestamp_ns;
			return a.worker < b.worker;
		});
	return result;
}

inline void write_csv(std::ostream &out, const DumpResult &result)
{
	out << "timestampNs,worker,event,payload\n";
	for (const DumpedRecord &r : result.records) {
		out << r.record.timestamp_ns << ',' << r.worker << ',';
		if (const char *name = event_name(r.record.event))
			out << name;
		else
			out << "event_" << r.record.event;
		out << ',' << r.record.payload << '\n';
	}
}

} // namespace taskforge::trace
