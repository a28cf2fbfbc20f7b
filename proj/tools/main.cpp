#include <iostream>

#include "cli_common.hpp"
#include "fundata/errors.hpp"

int main(int argc, char** argv) {
    using namespace fundata::cli;
    CLI::App app{"fundata: functional data analysis from the command line"};
    app.name("fundata");
    app.require_subcommand(1);
    Action action;
    register_simulate(app, action);
    register_smooth(app, action);
    register_moments(app, action);
    register_fpca(app, action);
    register_fcubt(app, action);
    register_plot(app, action);
    register_convert(app, action);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return kExitUsage;
    }
    try {
        if (action) action();
        return kExitOk;
    } catch (const UsageError& e) {
        report_error("usage", e.what());
        return kExitUsage;
    } catch (const fundata::IoError& e) {
        report_error("io", e.what());
    } catch (const fundata::ValidationError& e) {
        report_error("validation", e.what());
    } catch (const fundata::Error& e) {
        report_error("runtime", e.what());
    } catch (const std::exception& e) {
        report_error("runtime", e.what());
    }
    return kExitRuntime;
}
