# Core modules: settings, errors, report schemas and GF(2) algebra
