from setuptools import setup
from setuptools_rust import Binding, RustExtension

setup(
    rust_extensions=[
        # optional: without a Rust toolchain the pure-Python pairing backend is used
        RustExtension("abesd._native", path="rust/Cargo.toml", binding=Binding.PyO3, optional=True, debug=False),
    ],
)
