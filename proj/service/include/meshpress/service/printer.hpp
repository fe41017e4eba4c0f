#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "meshpress/print_protocol.hpp"
#include "meshpress/service/job.hpp"

namespace meshpress::service {

class PrinterDevice {
public:
    virtual ~PrinterDevice() = default;
    /// Throws std::runtime_error on a failed write.
    virtual void write(std::span<const std::uint8_t> bytes) = 0;
};

/// Character device, or an append-mode capture file for `capture:<path>`.
class FileDevice final : public PrinterDevice {
public:
    explicit FileDevice(const std::string& spec);
    ~FileDevice() override;
    FileDevice(const FileDevice&) = delete;
    FileDevice& operator=(const FileDevice&) = delete;

    void write(std::span<const std::uint8_t> bytes) override;

private:
    std::string path_;
    int fd_ = -1;
};

using DeviceFactory = std::function<std::unique_ptr<PrinterDevice>()>;

DeviceFactory file_device_factory(std::string spec);

struct LayerFrame {
    Channel layer;
    std::span<const std::uint8_t> bytes;
};

/// Owns the physical printer. One execution at a time; each frame is followed
/// by a feed command.
class PrinterSession {
public:
    explicit PrinterSession(DeviceFactory factory) : factory_(std::move(factory)) {}

    /// Writes frames in the given order. On a device failure the partial
    /// record is returned with completed = false and `failure` set.
    PrintExecution execute(std::span<const LayerFrame> frames, std::string* failure);

    /// Number of executions currently running (0 or 1).
    int active() const noexcept;

private:
    DeviceFactory factory_;
    mutable std::mutex mutex_;
    std::atomic<int> active_{0};
};

} // namespace meshpress::service
