from setuptools import setup, find_packages

setup(
    name="wagener_hull",
    version="1.0.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "matplotlib",
        "numpy",
        "pandas",
        "python-dotenv"
    ],
    extras_require={
        "test": ["pytest"]
    },
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "hull=wagener_hull.__main__:main"
        ]
    }
)
