#include <gtest/gtest.h>

#include <cstdlib>

#include "meshpress/error.hpp"
#include "meshpress/service/service_config.hpp"
#include "test_support.hpp"

using namespace meshpress;
using namespace meshpress::service;

TEST(ServiceConfig, ExampleFileMatchesDefaults) {
    unsetenv("PRINTER_DEVICE");
    unsetenv("STYLIZER_URL");
    unsetenv("BIND_ADDR");
    const ServiceConfig cfg = load_service_config(MESHPRESS_SOURCE_DIR "/meshpress.example.toml");
    const ServiceConfig defaults;
    EXPECT_EQ(cfg.bind_addr, defaults.bind_addr);
    EXPECT_EQ(cfg.printer_device, defaults.printer_device);
    EXPECT_EQ(cfg.stylizer_url, "http://127.0.0.1:8081/stylize");
    EXPECT_EQ(cfg.stylizer_timeout_ms, 10000);
    EXPECT_TRUE(cfg.stylizer_fallback);
    EXPECT_EQ(cfg.workers, 1);
    EXPECT_EQ(cfg.pipeline.hash(), PipelineConfig{}.hash());
}

TEST(ServiceConfig, SectionsAndTypes) {
    const ServiceConfig cfg = service_config_from_toml(
        "[service]\nworkers = 3\nstylizer_fallback = false\nprinter_device = \"/dev/usb/lp0\"\n"
        "[pipeline]\ntheta_k = 0.25\n");
    EXPECT_EQ(cfg.workers, 3);
    EXPECT_FALSE(cfg.stylizer_fallback);
    EXPECT_EQ(cfg.printer_device, "/dev/usb/lp0");
    EXPECT_DOUBLE_EQ(cfg.pipeline.theta_k, 0.25);

    EXPECT_THROW(service_config_from_toml("[service]\nworkers = many\n"), Error);
    EXPECT_THROW(service_config_from_toml("[service]\nstylizer_fallback = maybe\n"), Error);
    EXPECT_THROW(service_config_from_toml("[pipeline]\ntheta_k = 2\n"), Error);
}

TEST(ServiceConfig, EnvironmentOverrides) {
    setenv("PRINTER_DEVICE", "capture:/tmp/x.bin", 1);
    setenv("STYLIZER_URL", "http://10.0.0.1:9000/stylize", 1);
    setenv("BIND_ADDR", "0.0.0.0:9999", 1);
    const ServiceConfig cfg = load_service_config("");
    unsetenv("PRINTER_DEVICE");
    unsetenv("STYLIZER_URL");
    unsetenv("BIND_ADDR");
    EXPECT_EQ(cfg.printer_device, "capture:/tmp/x.bin");
    EXPECT_EQ(cfg.stylizer_url, "http://10.0.0.1:9000/stylize");
    EXPECT_EQ(cfg.bind_addr, "0.0.0.0:9999");
    EXPECT_THROW(load_service_config("/nonexistent/meshpress.toml"), Error);
}

TEST(ServiceConfig, BindAddress) {
    EXPECT_EQ(split_bind_addr("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
    EXPECT_EQ(split_bind_addr("localhost:0"), (std::pair<std::string, int>{"localhost", 0}));
    EXPECT_THROW(split_bind_addr("8080"), Error);
    EXPECT_THROW(split_bind_addr(":8080"), Error);
    EXPECT_THROW(split_bind_addr("host:99999"), Error);
    EXPECT_THROW(split_bind_addr("host:http"), Error);
}
