//! Synthetic Gradle project generation, sized for benchmarking the
//! extraction pipeline on realistic multi-module shapes.

use std::fs;
use std::io;
use std::path::Path;

/// Writes a project with one application module and `libs` library modules.
/// Each library declares `deps_per_module` remote dependencies, half of them
/// through root-level version variables so variable resolution is exercised
/// too. Dependencies are unique per module, so the expected label count is
/// `libs * deps_per_module + 2` (the application adds two of its own).
pub fn generate_project(root: &Path, libs: usize, deps_per_module: usize) -> io::Result<()> {
    let mut settings = String::from("rootProject.name = 'bench'\ninclude ':app'\n");
    for n in 0..libs {
        settings.push_str(&format!("include ':lib{n}'\n"));
    }
    fs::create_dir_all(root)?;
    fs::write(root.join("settings.gradle"), settings)?;

    let mut root_build = String::from("ext {\n");
    for n in 0..libs {
        root_build.push_str(&format!("    lib{n}Version = '1.{n}.0'\n"));
    }
    root_build.push_str("}\n");
    fs::write(root.join("build.gradle"), root_build)?;

    let mut app = String::from("apply plugin: 'com.android.application'\n\ndependencies {\n");
    for n in 0..libs {
        app.push_str(&format!("    implementation project(':lib{n}')\n"));
    }
    app.push_str("    implementation 'com.bench.app:core:1.0.0'\n");
    app.push_str("    api 'com.bench.app:ui:2.3.4'\n");
    app.push_str("    testImplementation 'junit:junit:4.13.2'\n");
    app.push_str("}\n");
    fs::create_dir_all(root.join("app"))?;
    fs::write(root.join("app/build.gradle"), app)?;

    for n in 0..libs {
        let mut lib = String::from("apply plugin: 'com.android.library'\n\ndependencies {\n");
        for d in 0..deps_per_module {
            if d % 2 == 0 {
                lib.push_str(&format!(
                    "    implementation \"com.bench.m{n}:artifact{d}:$lib{n}Version\"\n"
                ));
            } else {
                lib.push_str(&format!(
                    "    implementation 'com.bench.m{n}:artifact{d}:{}.{d}.1'\n",
                    n + 1
                ));
            }
        }
        lib.push_str("}\n");
        let dir = root.join(format!("lib{n}"));
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("build.gradle"), lib)?;
    }
    Ok(())
}
