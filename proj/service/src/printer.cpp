#include "meshpress/service/printer.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace meshpress::service {

FileDevice::FileDevice(const std::string& spec) {
    constexpr std::string_view capture = "capture:";
    int flags = O_WRONLY | O_CLOEXEC;
    if (spec.rfind(capture, 0) == 0) {
        path_ = spec.substr(capture.size());
        flags |= O_CREAT | O_APPEND;
    } else {
        path_ = spec;
    }
    if (path_.empty()) throw std::runtime_error("empty printer device path");
    fd_ = ::open(path_.c_str(), flags, 0644);
    if (fd_ < 0) throw std::runtime_error("cannot open printer device '" + path_ + "': " + std::strerror(errno));
}

FileDevice::~FileDevice() {
    if (fd_ >= 0) ::close(fd_);
}

void FileDevice::write(std::span<const std::uint8_t> bytes) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        const auto n = ::write(fd_, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("write to '" + path_ + "' failed: " + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
}

DeviceFactory file_device_factory(std::string spec) {
    return [spec = std::move(spec)]() -> std::unique_ptr<PrinterDevice> { return std::make_unique<FileDevice>(spec); };
}

PrintExecution PrinterSession::execute(std::span<const LayerFrame> frames, std::string* failure) {
    std::lock_guard lock(mutex_);
    ++active_;
    PrintExecution exec;
    exec.started_at = utc_timestamp();
    try {
        auto device = factory_();
        for (const LayerFrame& f : frames) {
            const auto t0 = std::chrono::steady_clock::now();
            device->write(f.bytes);
            device->write(kFeedCommand);
            const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
            exec.frames.push_back({f.layer, f.bytes.size(), dt.count()});
        }
        exec.completed = true;
    } catch (const std::exception& e) {
        if (failure) *failure = e.what();
    }
    --active_;
    return exec;
}

int PrinterSession::active() const noexcept { return active_; }

} // namespace meshpress::service
