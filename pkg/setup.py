from setuptools import setup

with open("README.rst") as f:
    readme = f.read()

setup(
    name="domainholder",
    version="0.1.0",
    description="Identify the organization holding a domain via privacy-policy analysis and WHOIS registrant lookup.",
    long_description=readme,
    keywords=["whois", "privacy policy", "data controller", "domain attribution", "tls"],
    url="https://github.com/domainholder/domainholder/",
    license="MIT",
    author="domainholder developers",
    author_email="domainholder@users.noreply.github.com",
    packages=[
        "domainholder",
        "domainholder.names",
        "domainholder.fetch_manager",
        "domainholder.whois",
        "domainholder.certinfo",
        "domainholder.policy",
        "domainholder.resolver",
        "domainholder.evalbench",
        "domainholder.audit",
    ],
    package_data={"domainholder": ["data/*.*", "data/languages/*.txt", "data/corpus/*.tsv", "data/corpus/*/*.txt"]},
    install_requires=[
        "beautifulsoup4>=4.9.0",
        "cryptography>=3.1",
        "numpy>=1.19.0",
        "requests>=2.24.0",
        "rich>=10.0.0",
        "scikit-learn>=0.24.0",
        "tldextract>=3.1.0",
    ],
    extras_require={"async": ["aiofiles>=0.4.0", "async_timeout>=3.0.0"]},
    entry_points={"console_scripts": ["domainholder=domainholder.cli:main"]},
    python_requires=">=3.7",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
    ],
    test_suite="tests",
)
