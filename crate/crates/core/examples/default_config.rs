fn main(){ print!("{}", ubeas::GameConfig::default().to_config_string()); }
