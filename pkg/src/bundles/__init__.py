# bundles package
