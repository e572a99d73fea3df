#include <texcls/error.hpp>

namespace texcls {

void rethrow_with_context(const std::string& prefix) {
    try {
        throw;
    } catch (const ContractError& e) {
        throw ContractError(prefix + e.what());
    } catch (const ParameterError& e) {
        throw ParameterError(prefix + e.what());
    } catch (const DataError& e) {
        throw DataError(prefix + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    } catch (const std::exception& e) {
        throw NumericalError(prefix + e.what());
    }
}

} // namespace texcls
